#pragma once

#include "selfrec/common.hpp"

namespace selfrec {

// Five 3x3 conv layers with dense connections: layer k sees the input and
// every previous feature map, LeakyReLU in between. The last layer projects
// back to the requested output width and starts at zero so a fresh subnet is
// the zero map, which keeps freshly built coupling blocks at identity.
struct DenseSubnetImpl : torch::nn::Module {
  DenseSubnetImpl(int in_channels, int out_channels, int hidden);

  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, conv3{nullptr},
      conv4{nullptr}, conv5{nullptr};
  double slope = 0.2;
};
TORCH_MODULE(DenseSubnet);

struct TransformerSubnetOptions {
  int channels = 3;
  int patch = 4;
  int embed_dim = 192;
  int heads = 6;
  int mlp_dim = 384;
};

// One pre-norm-free (classic post-norm) transformer encoder layer over
// non-overlapping patches, followed by two stride-2 transposed convolutions
// that bring the tokens back to the input resolution. Positional encoding is
// the fixed sinusoidal table over the flattened token index. The final
// deconvolution starts at zero (same reasoning as DenseSubnet).
struct TransformerSubnetImpl : torch::nn::Module {
  explicit TransformerSubnetImpl(TransformerSubnetOptions opts);

  torch::Tensor forward(const torch::Tensor& x);

  TransformerSubnetOptions opts_;
  torch::nn::Linear patch_embed{nullptr};
  torch::nn::Linear qkv{nullptr}, attn_out{nullptr};
  torch::nn::LayerNorm norm1{nullptr}, norm2{nullptr};
  torch::nn::Linear mlp_in{nullptr}, mlp_out{nullptr};
  torch::nn::ConvTranspose2d up1{nullptr}, up2{nullptr};

 private:
  torch::Tensor positional_encoding(int64_t tokens, const torch::TensorOptions& o);
};
TORCH_MODULE(TransformerSubnet);

}  // namespace selfrec
