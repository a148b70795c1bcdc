#include "selfrec/enhance.hpp"

namespace selfrec {

EnhancerImpl::EnhancerImpl(IEOptions opts) : opts_(opts) {
  auto conv = [](int in, int out) {
    return torch::nn::Conv2d(
        torch::nn::Conv2dOptions(in, out, 3).padding(1).bias(true));
  };
  head = register_module("head", conv(3, opts_.width));
  for (int i = 0; i < 2 * opts_.depth; ++i) {
    body.push_back(register_module("body" + std::to_string(i),
                                   conv(opts_.width, opts_.width)));
  }
  tail = register_module("tail", conv(opts_.width, 3));
  torch::NoGradGuard ng;
  torch::nn::init::zeros_(tail->weight);
  torch::nn::init::zeros_(tail->bias);
}

torch::Tensor EnhancerImpl::forward(const torch::Tensor& x) {
  bool was_3d = false;
  auto in = detail::as_batched(x, was_3d);
  auto h = torch::leaky_relu(head(in), 0.2);
  for (int i = 0; i < opts_.depth; ++i) {
    auto r = torch::leaky_relu(body[size_t(2 * i)](h), 0.2);
    r = body[size_t(2 * i + 1)](r);
    h = h + r;
  }
  auto out = in + tail(h);
  return detail::restore_rank(out, was_3d);
}

}  // namespace selfrec
