#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <torch/torch.h>

namespace selfrec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

using TensorPair = std::pair<torch::Tensor, torch::Tensor>;

// splitmix64 (Steele et al.), the generator behind keyed permutations and all
// sampling decisions that have to reproduce bit-for-bit across platforms.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // bounded draw by modulo; bias is irrelevant here, reproducibility is not
  uint64_t next_below(uint64_t n) { return next() % n; }

  double next_unit() {  // uniform in [0,1)
    return double(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  int64_t next_int(int64_t lo, int64_t hi) {  // inclusive range
    return lo + int64_t(next_below(uint64_t(hi - lo + 1)));
  }
};

namespace detail {

// most ops accept a single image (C,H,W) or a batch (N,C,H,W)
inline torch::Tensor as_batched(const torch::Tensor& t, bool& was_3d) {
  if (t.dim() == 3) {
    was_3d = true;
    return t.unsqueeze(0);
  }
  if (t.dim() == 4) {
    was_3d = false;
    return t;
  }
  throw ShapeError("expected a 3d (C,H,W) or 4d (N,C,H,W) tensor, got dim=" +
                   std::to_string(t.dim()));
}

inline torch::Tensor restore_rank(const torch::Tensor& t, bool was_3d) {
  return was_3d ? t.squeeze(0) : t;
}

inline void check_finite(const torch::Tensor& t, const std::string& where) {
  if (!torch::isfinite(t).all().item<bool>()) {
    throw NumericError("non-finite values in " + where);
  }
}

}  // namespace detail

}  // namespace selfrec
