#pragma once

#include <array>
#include <functional>

#include "selfrec/common.hpp"

namespace selfrec {

// Optional perceptual distance plugged into the container and enhancement
// losses. Disabled (empty) by default; the training objective is pure MSE
// then. Must return a scalar tensor.
using PerceptualHook =
    std::function<torch::Tensor(const torch::Tensor&, const torch::Tensor&)>;

struct LossWeights {
  double perceptual = 10.0;  // weight of the hook inside w/ie terms
  double w = 150.0;          // container fidelity
  double e = 10.0;           // secret extraction
  double tv = 10.0;          // secret smoothness
  double wg = 10.0;          // generator round trip
  double ie = 20.0;          // enhancement fidelity
  double tl = 1.0;           // localization
};

// Container fidelity: mean squared error, plus the perceptual hook when set.
torch::Tensor loss_w(const torch::Tensor& container, const torch::Tensor& cover,
                     const PerceptualHook& hook = nullptr,
                     double perceptual_weight = 10.0);

// Secret extraction error restricted to untampered pixels: the MSE is taken
// only where mask == 0 (mask given in the same frame as the secrets).
// A fully tampered mask yields zero and a warning on stderr.
torch::Tensor loss_e(const torch::Tensor& secret,
                     const torch::Tensor& secret_est,
                     const torch::Tensor& mask);

// Weighted sum of the six named components, in this fixed order:
// {w, e, tv, wg, ie, tl}.
torch::Tensor loss_total(const std::array<torch::Tensor, 6>& components,
                         const LossWeights& weights);

}  // namespace selfrec
