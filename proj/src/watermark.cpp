#include "selfrec/watermark.hpp"

namespace selfrec {

NoiseEstimatorImpl::NoiseEstimatorImpl(int channels, int hidden) {
  auto conv = [](int in, int out) {
    return torch::nn::Conv2d(
        torch::nn::Conv2dOptions(in, out, 3).padding(1).bias(true));
  };
  c1 = register_module("c1", conv(channels, hidden));
  c2 = register_module("c2", conv(hidden, hidden));
  c3 = register_module("c3", conv(hidden, hidden));
  c4 = register_module("c4", conv(hidden, channels));
  torch::NoGradGuard ng;
  torch::nn::init::zeros_(c4->weight);
  torch::nn::init::zeros_(c4->bias);
}

torch::Tensor NoiseEstimatorImpl::forward(const torch::Tensor& subbands) {
  auto h = torch::leaky_relu(c1(subbands), 0.2);
  h = torch::leaky_relu(c2(h), 0.2);
  h = torch::leaky_relu(c3(h), 0.2);
  return c4(h);
}

WatermarkerImpl::WatermarkerImpl(IWOptions opts) : opts_(opts) {
  inn = register_module("inn", make_dense_inn(opts_.blocks, 12, opts_.hidden));
  estimator = register_module("estimator", NoiseEstimator(12, opts_.hidden));
}

TensorPair WatermarkerImpl::embed(const torch::Tensor& cover,
                                  const torch::Tensor& secret) {
  auto [a, b] = inn->forward(dwt_haar(cover), dwt_haar(secret));
  return {iwt_haar(a), b};
}

TensorPair WatermarkerImpl::extract(const torch::Tensor& attacked,
                                    const torch::Tensor& residual_estimate) {
  auto [c, s] = inn->inverse(dwt_haar(attacked), residual_estimate);
  return {iwt_haar(c), iwt_haar(s)};
}

torch::Tensor WatermarkerImpl::estimate_residual(const torch::Tensor& attacked,
                                                 NoiseMode mode) {
  auto sub = dwt_haar(attacked);
  if (mode == NoiseMode::kZero) {
    return torch::zeros_like(sub);
  }
  return estimator(sub);
}

}  // namespace selfrec
