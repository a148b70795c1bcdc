#pragma once

#include <vector>

#include "selfrec/common.hpp"

namespace selfrec {

// Key for the patch permutation. patch must divide both image dims.
struct ShuffleKey {
  uint64_t seed = 0;
  int patch = 1;
};

// Fisher-Yates permutation of the row-major patch grid, driven by splitmix64
// seeded with key.seed. Draws are bounded by modulo. The result is the same
// on every platform for a given key and grid, which is what makes a shuffle
// key shareable. perm[g] is the source patch for output slot g.
std::vector<int64_t> build_permutation(const ShuffleKey& key, int64_t h, int64_t w);

// Apply / undo the keyed patch permutation on (C,H,W) or (N,C,H,W) tensors.
// Both directions are pure index moves: exact inverses of each other and
// transparent to gradients.
torch::Tensor shuffle(const torch::Tensor& img, const ShuffleKey& key);
torch::Tensor unshuffle(const torch::Tensor& img, const ShuffleKey& key);

// Reusable form: builds the index tensors once for a fixed key and shape.
class Shuffler {
 public:
  Shuffler(const ShuffleKey& key, int64_t h, int64_t w);

  torch::Tensor apply(const torch::Tensor& img) const;
  torch::Tensor undo(const torch::Tensor& img) const;

  const ShuffleKey& key() const { return key_; }

 private:
  torch::Tensor permute_patches(const torch::Tensor& img,
                                const torch::Tensor& index) const;

  ShuffleKey key_;
  int64_t h_, w_;
  torch::Tensor fwd_, inv_;  // int64 patch index tensors
};

}  // namespace selfrec
