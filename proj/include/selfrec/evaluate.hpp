#pragma once

#include <functional>
#include <string>

#include "selfrec/dataset.hpp"
#include "selfrec/metrics.hpp"
#include "selfrec/pipeline.hpp"

namespace selfrec {

struct EvalSummary {
  MetricReport report;  // one row per image: recovery quality + localization
  std::optional<double> mean_container_psnr;
  std::optional<double> mean_attacked_psnr;
  std::optional<double> mean_recovered_psnr;
  std::optional<double> mean_masked_psnr;
  std::optional<double> mean_iou;
  std::optional<double> mean_f1;
  std::optional<double> mean_auc;
};

// Full protocol per image: embed, attack (splice + degradation per the eval
// config), recover, score against the original. `emit` (optional) receives
// every intermediate for writing artifacts.
struct EvalEmit {
  std::function<void(const std::string& name, const torch::Tensor& img)> image;
  std::function<void(const std::string& name, const torch::Tensor& mask)> mask;
};

EvalSummary evaluate_pipeline(Pipeline& pipeline, const RunConfig& cfg,
                              const ImageSet& val,
                              const EvalEmit* emit = nullptr);

}  // namespace selfrec
