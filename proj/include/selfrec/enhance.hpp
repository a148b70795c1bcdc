#pragma once

#include "selfrec/common.hpp"

namespace selfrec {

struct IEOptions {
  int depth = 8;  // residual blocks
  int width = 32;
};

// Residual enhancement head: out = x + tail(blocks(head(x))). The tail conv
// starts at zero so enhancement is the identity until trained.
struct EnhancerImpl : torch::nn::Module {
  explicit EnhancerImpl(IEOptions opts = {});

  torch::Tensor forward(const torch::Tensor& x);

  IEOptions opts_;
  torch::nn::Conv2d head{nullptr}, tail{nullptr};
  std::vector<torch::nn::Conv2d> body;
};
TORCH_MODULE(Enhancer);

}  // namespace selfrec
