#pragma once

#include <string>
#include <vector>

#include "selfrec/common.hpp"

namespace selfrec {

// 8-bit sRGB file -> (3,H,W) float in [0,1] (value/255).
torch::Tensor load_image(const std::string& path);

// (3,H,W) float -> 8-bit file. Values are clipped to [0,1] and scaled by 255
// with round-half-away-from-zero.
void save_image(const torch::Tensor& img, const std::string& path);

// Single-channel masks: 255 = tampered, 0 = intact.
torch::Tensor load_mask(const std::string& path);
void save_mask(const torch::Tensor& mask, const std::string& path);

// Center-crop to square then scale to size x size.
torch::Tensor center_crop_resize(const torch::Tensor& img, int64_t size);

// Sorted list of image files (png/jpg/jpeg) directly inside dir.
std::vector<std::string> list_images(const std::string& dir);

}  // namespace selfrec
