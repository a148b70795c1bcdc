#pragma once

#include "selfrec/inn.hpp"
#include "selfrec/wavelet.hpp"

namespace selfrec {

struct IWOptions {
  int blocks = 12;
  int hidden = 32;
};

// Predicts the lost-information tensor from the attacked image's subbands.
// Four 3x3 conv layers, zero-init final, so a fresh estimator predicts zero.
struct NoiseEstimatorImpl : torch::nn::Module {
  explicit NoiseEstimatorImpl(int channels = 12, int hidden = 32);
  torch::Tensor forward(const torch::Tensor& subbands);

  torch::nn::Conv2d c1{nullptr}, c2{nullptr}, c3{nullptr}, c4{nullptr};
};
TORCH_MODULE(NoiseEstimator);

enum class NoiseMode { kZero, kLearned };

// Invertible watermark embedder. Both branches live in the Haar subband
// domain (12 channels for RGB input). Embedding consumes a cover image and a
// (shuffled) secret image and produces the container plus the residual
// subband tensor that exact re-inversion would need. Extraction runs the same
// stack backwards from the attacked container and an estimate of that
// residual.
struct WatermarkerImpl : torch::nn::Module {
  explicit WatermarkerImpl(IWOptions opts = {});

  // returns {container (pixel domain, unclipped), residual subbands}
  TensorPair embed(const torch::Tensor& cover, const torch::Tensor& secret);

  // returns {cover estimate, secret estimate}, both pixel domain
  TensorPair extract(const torch::Tensor& attacked,
                     const torch::Tensor& residual_estimate);

  torch::Tensor estimate_residual(const torch::Tensor& attacked,
                                  NoiseMode mode);

  IWOptions opts_;
  InnStack inn{nullptr};
  NoiseEstimator estimator{nullptr};
};
TORCH_MODULE(Watermarker);

}  // namespace selfrec
