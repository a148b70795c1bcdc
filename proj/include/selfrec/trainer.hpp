#pragma once

#include <memory>
#include <string>

#include "selfrec/dataset.hpp"
#include "selfrec/pipeline.hpp"

namespace selfrec {

struct StepRecord {
  int64_t iteration = 0;
  double l_w = 0, l_e = 0, l_tv = 0, l_wg = 0, l_ie = 0, l_tl = 0;
  double l_noise = 0;  // auxiliary supervision, zero unless enabled
  double total = 0;
};

// Fixed-format line for the loss log; identical runs produce identical bytes.
std::string format_record(const StepRecord& r);

// Joint optimization of every module with a single Adam instance. Fully
// deterministic for a fixed seed and thread count: weight init, batch order,
// masks, degradations and donor picks all derive from train.seed.
class Trainer {
 public:
  Trainer(const RunConfig& cfg, ImageSet train_set,
          PerceptualHook hook = nullptr);

  StepRecord step();

  Pipeline& pipeline() { return pipeline_; }
  const RunConfig& config() const { return cfg_; }
  int64_t iteration() const { return iteration_; }

  void save(const std::string& path) const;

  // pre-step parameter copy, kept so a halt can write recoverable state
  void save_snapshot(const std::string& path) const;

 private:
  void take_snapshot();
  void restore_snapshot();

  RunConfig cfg_;
  ImageSet data_;
  Pipeline pipeline_{nullptr};
  std::unique_ptr<torch::optim::Adam> opt_;
  SplitMix64 rng_;
  DegradationPreset preset_;
  PerceptualHook hook_;
  int64_t iteration_ = 0;
  std::vector<torch::Tensor> snapshot_;
};

}  // namespace selfrec
