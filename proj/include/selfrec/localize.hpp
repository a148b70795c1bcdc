#pragma once

#include "selfrec/common.hpp"

namespace selfrec {

struct TLOptions {
  int base_width = 16;
  int in_channels = 6;  // attacked image + extracted shuffled secret
};

// Small U-Net (3 pooling levels) that maps the attacked container and the
// extracted shuffled secret to a per-pixel tamper probability in (0,1).
struct LocalizerImpl : torch::nn::Module {
  explicit LocalizerImpl(TLOptions opts = {});

  // (N,6,H,W) -> (N,H,W) soft mask
  torch::Tensor forward(const torch::Tensor& x);

  TLOptions opts_;
  torch::nn::Conv2d e1a{nullptr}, e1b{nullptr}, e2a{nullptr}, e2b{nullptr},
      e3a{nullptr}, e3b{nullptr}, ba{nullptr}, bb{nullptr};
  torch::nn::ConvTranspose2d u3{nullptr}, u2{nullptr}, u1{nullptr};
  torch::nn::Conv2d d3a{nullptr}, d3b{nullptr}, d2a{nullptr}, d2b{nullptr},
      d1a{nullptr}, d1b{nullptr}, out_conv{nullptr};
};
TORCH_MODULE(Localizer);

// Hard threshold; >= thr counts as tampered.
torch::Tensor binarize_mask(const torch::Tensor& soft, double thr = 0.5);

// Per-pixel blend: mask * fg + (1 - mask) * bg. The mask may be soft or
// binary, shaped (H,W) or (N,H,W); images carry a channel axis.
torch::Tensor composite(const torch::Tensor& fg, const torch::Tensor& bg,
                        const torch::Tensor& mask);

// Mean binary cross entropy with probabilities clamped to [eps, 1-eps].
torch::Tensor bce_loss(const torch::Tensor& soft, const torch::Tensor& truth,
                       double eps = 1e-6);

}  // namespace selfrec
