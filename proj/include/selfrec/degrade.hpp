#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfrec/common.hpp"

namespace selfrec {

enum class DegradationKind {
  kNone,
  kGaussianNoise,   // sigma on the 8-bit scale
  kJpeg,            // quality factor
  kGaussianFilter,  // kernel size + sigma
  kMedianFilter,    // kernel size
  kPoissonNoise,    // scale alpha
  kHue,             // shift in [-0.5, 0.5] of the hue circle
  kBrightness,      // multiplicative factor
  kContrast,        // factor around the image mean
};

std::string to_string(DegradationKind k);
DegradationKind degradation_kind_from_string(const std::string& s);

struct DegradationSpec {
  DegradationKind kind = DegradationKind::kNone;
  double sigma = 0.0;     // gaussian noise / gaussian filter
  int quality = 90;       // jpeg
  int ksize = 3;          // filters
  double alpha = 4.0;     // poisson
  double delta = 0.0;     // hue shift
  double factor = 1.0;    // brightness / contrast
  bool train_mode = false;  // jpeg: soft rounding instead of hard

  bool differentiable() const;
};

// Sampling ranges for one degradation family.
struct DegradationRange {
  DegradationKind kind = DegradationKind::kNone;
  double lo = 0.0, hi = 0.0;  // sigma / alpha / delta / factor range
  int q_lo = 75, q_hi = 95;   // jpeg quality range
  int ksize = 3;
  double sigma = 1.0;  // fixed blur sigma
};

// A preset is the menu of families a pipeline stage samples from.
struct DegradationPreset {
  std::string name;
  std::vector<DegradationRange> menu;
};

DegradationPreset train_preset();
DegradationPreset eval_preset();
DegradationPreset none_preset();
DegradationPreset preset_by_name(const std::string& name);

// Load preset tables from a JSON file ({"train": [...], "eval": [...]}).
std::vector<DegradationPreset> load_presets(const std::string& path);

// Apply one fully specified degradation. Input (C,H,W) or (N,C,H,W) in
// [0,1]; output clipped back to [0,1]. `seed` drives any sampling noise.
torch::Tensor apply_degradation(const torch::Tensor& img,
                                const DegradationSpec& spec, uint64_t seed = 0);

// Draw a family uniformly from the preset menu, then its parameters
// uniformly from their ranges; returns the degraded image and what was done.
std::pair<torch::Tensor, DegradationSpec> random_degradation(
    const torch::Tensor& img, const DegradationPreset& preset, SplitMix64& rng,
    bool train_mode);

// Differentiable JPEG pipeline used by kJpeg (green path for tests).
torch::Tensor jpeg_degrade(const torch::Tensor& img, int quality,
                           bool train_mode);

}  // namespace selfrec
