#pragma once

#include <string>

#include "selfrec/common.hpp"

namespace selfrec {

enum class MaskStrategy { kIrregular, kBox };

struct MaskSpec {
  MaskStrategy strategy = MaskStrategy::kIrregular;
  int min_strokes = 1, max_strokes = 5;
  double min_width = 20.0, max_width = 50.0;  // stroke thickness in px
  int max_turns = 4;                          // direction changes per stroke
  int min_boxes = 1, max_boxes = 3;
  int min_edge = 50, max_edge = 150;  // box side in px
  int box_margin = 10;
  double min_coverage = 0.10, max_coverage = 0.50;
};

struct MaskStats {
  int strokes = 0;
  int boxes = 0;
  double coverage = 0.0;
  int resamples = 0;
};

// Binary (H,W) float mask, 1 = tampered. Resamples until coverage lands in
// [min_coverage, max_coverage] (best effort after a bounded number of tries).
torch::Tensor generate_mask(const MaskSpec& spec, int64_t h, int64_t w,
                            SplitMix64& rng, MaskStats* stats = nullptr);

// Paste donor content where the mask is set: mask*donor + (1-mask)*img.
torch::Tensor splice(const torch::Tensor& img, const torch::Tensor& donor,
                     const torch::Tensor& mask);

}  // namespace selfrec
