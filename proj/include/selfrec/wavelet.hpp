#pragma once

#include "selfrec/common.hpp"

namespace selfrec {

// Single-level orthonormal Haar transform. An image (N,C,H,W) maps to
// (N,4C,H/2,W/2) with the four subbands of each input channel grouped
// together in the order LL,LH,HL,HH. For a 2x2 block
//   [a b]
//   [c d]
// the coefficients are
//   LL = (a+b+c+d)/2    LH = (a+b-c-d)/2   (difference across rows)
//   HL = (a-b+c-d)/2    HH = (a-b-c+d)/2   (difference across columns)
// The map is orthogonal, so energy is preserved exactly.
torch::Tensor dwt_haar(const torch::Tensor& img);

// Exact inverse of dwt_haar: (N,4C,H/2,W/2) -> (N,C,H,W).
torch::Tensor iwt_haar(const torch::Tensor& sub);

}  // namespace selfrec
