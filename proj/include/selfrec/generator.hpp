#pragma once

#include "selfrec/inn.hpp"
#include "selfrec/subnets.hpp"

namespace selfrec {

struct WGOptions {
  int blocks = 3;
  int patch = 4;
  int embed_dim = 192;
  int heads = 6;
};

// Invertible generator that turns an image into the secret actually embedded.
// Both coupling branches are full RGB images. The forward pass feeds the
// image into both branches and keeps the first output; the approximate
// inverse feeds the recovered secret into both branches of the reverse pass.
struct SecretGeneratorImpl : torch::nn::Module {
  explicit SecretGeneratorImpl(WGOptions opts = {});

  torch::Tensor generate(const torch::Tensor& image);
  torch::Tensor invert(const torch::Tensor& secret);

  WGOptions opts_;
  InnStack inn{nullptr};
};
TORCH_MODULE(SecretGenerator);

enum class TvReduction { kSum, kMean };

// Anisotropic squared total variation: for every interior-adjacent pixel pair
// the squared horizontal and vertical forward differences, accumulated over
// channels. kSum returns the raw double sum; kMean divides by the number of
// accumulated terms so the magnitude is comparable across image sizes.
torch::Tensor tv_loss(const torch::Tensor& img,
                      TvReduction reduction = TvReduction::kSum);

}  // namespace selfrec
