#include "selfrec/losses.hpp"

#include <iostream>

namespace selfrec {

torch::Tensor loss_w(const torch::Tensor& container, const torch::Tensor& cover,
                     const PerceptualHook& hook, double perceptual_weight) {
  if (container.sizes() != cover.sizes()) {
    throw ShapeError("loss_w inputs must match");
  }
  auto l = torch::mean(torch::pow(container - cover, 2));
  if (hook) {
    l = l + perceptual_weight * hook(container, cover);
  }
  return l;
}

torch::Tensor loss_e(const torch::Tensor& secret,
                     const torch::Tensor& secret_est,
                     const torch::Tensor& mask) {
  if (secret.sizes() != secret_est.sizes()) {
    throw ShapeError("loss_e secrets must match");
  }
  auto m = mask;
  if (secret.dim() == m.dim() + 1) {
    m = m.unsqueeze(secret.dim() - 3);
  }
  auto keep = (m < 0.5).to(secret.dtype());
  auto kept = keep.expand_as(secret).sum();
  if (kept.item<double>() == 0.0) {
    std::cerr << "[warn] loss_e: mask covers everything, loss is zero\n";
    return torch::zeros({}, secret.options());
  }
  auto sq = torch::pow(secret - secret_est, 2) * keep;
  return sq.sum() / kept;
}

torch::Tensor loss_total(const std::array<torch::Tensor, 6>& components,
                         const LossWeights& weights) {
  const std::array<double, 6> w = {weights.w,  weights.e,  weights.tv,
                                   weights.wg, weights.ie, weights.tl};
  torch::Tensor total;
  for (size_t i = 0; i < 6; ++i) {
    if (components[i].numel() != 1) {
      throw ShapeError("loss components must be scalars");
    }
    if (!torch::isfinite(components[i]).item<bool>()) {
      static const char* names[6] = {"w", "e", "tv", "wg", "ie", "tl"};
      throw NumericError(std::string("non-finite loss component: ") + names[i]);
    }
    auto term = components[i] * w[i];
    total = i == 0 ? term : total + term;
  }
  return total;
}

}  // namespace selfrec
