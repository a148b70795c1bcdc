#pragma once

#include <string>
#include <vector>

#include "selfrec/common.hpp"

namespace selfrec {

// All images of a directory preloaded as one (N,3,S,S) tensor. Order is the
// sorted filename order, so iteration is reproducible.
struct ImageSet {
  torch::Tensor images;
  std::vector<std::string> names;

  int64_t size() const { return images.defined() ? images.size(0) : 0; }
};

// resize=false requires every image to already be size x size; a mismatch
// throws ShapeError. resize=true center-crops and scales.
ImageSet load_image_set(const std::string& dir, int64_t size, bool resize);

}  // namespace selfrec
