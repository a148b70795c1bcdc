#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfrec/common.hpp"

namespace selfrec {

// Peak signal-to-noise ratio over [0,1] images, all channels pooled.
// Identical inputs are capped at 100 dB. With a mask, only pixels where
// mask == 1 contribute (masked PSNR); an empty mask yields nullopt.
std::optional<double> psnr(const torch::Tensor& a, const torch::Tensor& b,
                           const std::optional<torch::Tensor>& mask = std::nullopt);

// Mean structural similarity on the channel-mean grayscale image, 11x11
// Gaussian window (sigma 1.5), C1=0.01^2, C2=0.03^2, valid positions only.
double ssim(const torch::Tensor& a, const torch::Tensor& b);

// Overlap scores between binary masks (anything >= 0.5 counts as set).
// Both-empty pairs score 1 by convention.
double iou(const torch::Tensor& pred, const torch::Tensor& truth);
double f1(const torch::Tensor& pred, const torch::Tensor& truth);

// Area under the ROC curve via the rank statistic; ties contribute half.
// Returns nullopt when only one class is present.
std::optional<double> auc(const torch::Tensor& scores,
                          const torch::Tensor& truth);

struct MetricRow {
  std::string name;
  std::optional<double> psnr_db;
  std::optional<double> masked_psnr_db;
  std::optional<double> ssim_val;
  std::optional<double> iou_val;
  std::optional<double> f1_val;
  std::optional<double> auc_val;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  MetricRow means() const;  // per-column mean over rows that have the value
  std::string to_csv() const;
  std::string to_table() const;  // human-readable, LPIPS column marked unavailable
  void write_csv(const std::string& path) const;
};

}  // namespace selfrec
