#pragma once

#include <optional>

#include "selfrec/config.hpp"
#include "selfrec/enhance.hpp"
#include "selfrec/generator.hpp"
#include "selfrec/localize.hpp"
#include "selfrec/shuffle.hpp"
#include "selfrec/watermark.hpp"

namespace selfrec {

struct EmbedOutputs {
  torch::Tensor secret;           // what the generator produced (or the image)
  torch::Tensor secret_shuffled;  // what actually went into the embedder
  torch::Tensor container;        // unclipped pixel-domain container
  torch::Tensor residual;         // subband residual the embedder split off
};

struct RecoverOutputs {
  torch::Tensor residual_est;
  torch::Tensor cover_est;
  torch::Tensor secret_shuffled_est;
  torch::Tensor secret_est;
  torch::Tensor coarse;     // recovered original before enhancement
  torch::Tensor enhanced;
  torch::Tensor soft_mask;
  torch::Tensor mask;       // binarized soft mask
  torch::Tensor recovered;  // composite of enhanced and attacked
};

// The full self-recovery model: secret generator, keyed shuffle, invertible
// embedder, enhancement head and tamper localizer, wired per ModelConfig.
// The shuffle permutation is bound to a fixed image size.
struct PipelineImpl : torch::nn::Module {
  PipelineImpl(const ModelConfig& cfg, int64_t image_size);

  torch::Tensor make_secret(const torch::Tensor& org);
  torch::Tensor shuffle_frame(const torch::Tensor& t) const;
  torch::Tensor unshuffle_frame(const torch::Tensor& t) const;

  EmbedOutputs embed(const torch::Tensor& org);
  RecoverOutputs recover(const torch::Tensor& attacked,
                         bool soft_composite = false);

  ModelConfig cfg_;
  int64_t image_size_ = 0;
  SecretGenerator wg{nullptr};
  Watermarker iw{nullptr};
  Enhancer ie{nullptr};
  Localizer tl{nullptr};
  std::optional<Shuffler> shuffler_;
};
TORCH_MODULE(Pipeline);

inline constexpr uint32_t kCheckpointVersion = 1;

struct LoadedCheckpoint {
  Pipeline pipeline{nullptr};
  RunConfig config;
  int64_t iteration = 0;
};

// Versioned binary container: format tag, full resolved config (which also
// carries the shuffle key), iteration counter, and every parameter and buffer
// as raw bytes. Round trips are bit exact.
void save_checkpoint(const Pipeline& pipeline, const RunConfig& config,
                     int64_t iteration, const std::string& path);
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace selfrec
