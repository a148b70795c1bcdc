#include "selfrec/shuffle.hpp"

#include <numeric>

namespace selfrec {

namespace {

void check_key(const ShuffleKey& key, int64_t h, int64_t w) {
  if (key.patch <= 0) {
    throw ConfigError("shuffle patch must be positive");
  }
  if (h % key.patch != 0 || w % key.patch != 0) {
    throw ShapeError("shuffle patch " + std::to_string(key.patch) +
                     " does not divide " + std::to_string(h) + "x" +
                     std::to_string(w));
  }
}

}  // namespace

std::vector<int64_t> build_permutation(const ShuffleKey& key, int64_t h,
                                       int64_t w) {
  check_key(key, h, w);
  const int64_t n = (h / key.patch) * (w / key.patch);
  std::vector<int64_t> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(key.seed);
  for (int64_t i = n - 1; i > 0; --i) {
    auto j = int64_t(rng.next_below(uint64_t(i + 1)));
    std::swap(perm[size_t(i)], perm[size_t(j)]);
  }
  return perm;
}

Shuffler::Shuffler(const ShuffleKey& key, int64_t h, int64_t w)
    : key_(key), h_(h), w_(w) {
  auto perm = build_permutation(key, h, w);
  const auto n = int64_t(perm.size());
  std::vector<int64_t> inv(perm.size());
  for (int64_t g = 0; g < n; ++g) {
    inv[size_t(perm[size_t(g)])] = g;
  }
  fwd_ = torch::tensor(perm, torch::kInt64);
  inv_ = torch::tensor(inv, torch::kInt64);
}

torch::Tensor Shuffler::permute_patches(const torch::Tensor& img,
                                        const torch::Tensor& index) const {
  bool was_3d = false;
  auto x = detail::as_batched(img, was_3d);
  if (x.size(2) != h_ || x.size(3) != w_) {
    throw ShapeError("shuffler built for " + std::to_string(h_) + "x" +
                     std::to_string(w_) + ", got " + std::to_string(x.size(2)) +
                     "x" + std::to_string(x.size(3)));
  }
  const auto n = x.size(0), c = x.size(1);
  const int64_t p = key_.patch;
  const auto gh = h_ / p, gw = w_ / p;
  // (N,C,H,W) -> (N, gh*gw, C,p,p), permute the grid axis, back
  auto patches = x.reshape({n, c, gh, p, gw, p})
                     .permute({0, 2, 4, 1, 3, 5})
                     .reshape({n, gh * gw, c, p, p});
  auto moved = patches.index_select(1, index);
  auto out = moved.reshape({n, gh, gw, c, p, p})
                 .permute({0, 3, 1, 4, 2, 5})
                 .reshape({n, c, h_, w_});
  return detail::restore_rank(out, was_3d);
}

torch::Tensor Shuffler::apply(const torch::Tensor& img) const {
  return permute_patches(img, fwd_);
}

torch::Tensor Shuffler::undo(const torch::Tensor& img) const {
  return permute_patches(img, inv_);
}

torch::Tensor shuffle(const torch::Tensor& img, const ShuffleKey& key) {
  const auto h = img.size(img.dim() - 2), w = img.size(img.dim() - 1);
  return Shuffler(key, h, w).apply(img);
}

torch::Tensor unshuffle(const torch::Tensor& img, const ShuffleKey& key) {
  const auto h = img.size(img.dim() - 2), w = img.size(img.dim() - 1);
  return Shuffler(key, h, w).undo(img);
}

}  // namespace selfrec
