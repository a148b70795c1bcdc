#include "selfrec/inn.hpp"

#include "selfrec/subnets.hpp"

namespace selfrec {

namespace {

void check_branch_shapes(const torch::Tensor& a, const torch::Tensor& b) {
  if (a.sizes() != b.sizes()) {
    throw ShapeError("coupling branches must have identical shapes");
  }
}

torch::Tensor bounded_exp(const torch::Tensor& s) {
  return torch::exp(torch::clamp(torch::sigmoid(s), -8.0, 8.0));
}

}  // namespace

CouplingBlockImpl::CouplingBlockImpl(torch::nn::AnyModule phi,
                                     torch::nn::AnyModule rho,
                                     torch::nn::AnyModule eta)
    : phi_(std::move(phi)), rho_(std::move(rho)), eta_(std::move(eta)) {
  register_module("phi", phi_.ptr());
  register_module("rho", rho_.ptr());
  register_module("eta", eta_.ptr());
}

TensorPair CouplingBlockImpl::forward(const torch::Tensor& x1,
                                      const torch::Tensor& x2) {
  check_branch_shapes(x1, x2);
  auto y1 = x1 + phi_.forward(x2);
  auto y2 = x2 * bounded_exp(rho_.forward(y1)) + eta_.forward(y1);
  return {y1, y2};
}

TensorPair CouplingBlockImpl::inverse(const torch::Tensor& y1,
                                      const torch::Tensor& y2) {
  check_branch_shapes(y1, y2);
  auto x2 = (y2 - eta_.forward(y1)) * torch::exp(-torch::clamp(
                torch::sigmoid(rho_.forward(y1)), -8.0, 8.0));
  auto x1 = y1 - phi_.forward(x2);
  return {x1, x2};
}

InnStackImpl::InnStackImpl(std::vector<CouplingBlock> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw ConfigError("an invertible stack needs at least one block");
  }
  for (size_t i = 0; i < blocks_.size(); ++i) {
    register_module("block" + std::to_string(i), blocks_[i]);
  }
}

TensorPair InnStackImpl::forward(torch::Tensor x1, torch::Tensor x2) {
  for (size_t i = 0; i < blocks_.size(); ++i) {
    std::tie(x1, x2) = blocks_[i]->forward(x1, x2);
    if (!torch::isfinite(x1).all().item<bool>() ||
        !torch::isfinite(x2).all().item<bool>()) {
      throw NumericError("non-finite activation after coupling block " +
                         std::to_string(i));
    }
  }
  return {x1, x2};
}

TensorPair InnStackImpl::inverse(torch::Tensor y1, torch::Tensor y2) {
  for (size_t i = blocks_.size(); i-- > 0;) {
    std::tie(y1, y2) = blocks_[i]->inverse(y1, y2);
    if (!torch::isfinite(y1).all().item<bool>() ||
        !torch::isfinite(y2).all().item<bool>()) {
      throw NumericError("non-finite activation inverting coupling block " +
                         std::to_string(i));
    }
  }
  return {y1, y2};
}

CouplingBlock make_dense_coupling(int channels, int hidden) {
  return CouplingBlock(
      torch::nn::AnyModule(DenseSubnet(channels, channels, hidden)),
      torch::nn::AnyModule(DenseSubnet(channels, channels, hidden)),
      torch::nn::AnyModule(DenseSubnet(channels, channels, hidden)));
}

InnStack make_dense_inn(int blocks, int channels, int hidden) {
  std::vector<CouplingBlock> v;
  for (int i = 0; i < blocks; ++i) {
    v.push_back(make_dense_coupling(channels, hidden));
  }
  return InnStack(std::move(v));
}

}  // namespace selfrec
