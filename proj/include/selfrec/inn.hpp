#pragma once

#include <vector>

#include "selfrec/common.hpp"

namespace selfrec {

// One affine coupling step over a pair of equally shaped branches:
//   y1 = x1 + phi(x2)
//   y2 = x2 * exp(sigmoid(rho(y1))) + eta(y1)
// The inverse needs only forward passes of the three subnets, so any
// parameterization inverts exactly:
//   x2 = (y2 - eta(y1)) * exp(-sigmoid(rho(y1)))
//   x1 = y1 - phi(x2)
// The exponent is clamped to [-8, 8] before exponentiation as an overflow
// guard (the sigmoid already bounds it in (0,1) when finite).
struct CouplingBlockImpl : torch::nn::Module {
  CouplingBlockImpl(torch::nn::AnyModule phi, torch::nn::AnyModule rho,
                    torch::nn::AnyModule eta);

  TensorPair forward(const torch::Tensor& x1, const torch::Tensor& x2);
  TensorPair inverse(const torch::Tensor& y1, const torch::Tensor& y2);

  torch::nn::AnyModule phi_, rho_, eta_;
};
TORCH_MODULE(CouplingBlock);

// A chain of coupling blocks; inverse applies the blocks in reverse order.
struct InnStackImpl : torch::nn::Module {
  explicit InnStackImpl(std::vector<CouplingBlock> blocks);

  TensorPair forward(torch::Tensor x1, torch::Tensor x2);
  TensorPair inverse(torch::Tensor y1, torch::Tensor y2);

  std::vector<CouplingBlock> blocks_;
};
TORCH_MODULE(InnStack);

// Builders for the two subnet families used by the pipeline.
CouplingBlock make_dense_coupling(int channels, int hidden);
InnStack make_dense_inn(int blocks, int channels, int hidden);

}  // namespace selfrec
