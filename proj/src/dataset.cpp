#include "selfrec/dataset.hpp"

#include <filesystem>

#include "selfrec/image_io.hpp"

namespace selfrec {

ImageSet load_image_set(const std::string& dir, int64_t size, bool resize) {
  ImageSet set;
  auto files = list_images(dir);
  std::vector<torch::Tensor> tensors;
  tensors.reserve(files.size());
  for (const auto& f : files) {
    auto img = load_image(f);
    if (img.size(1) != size || img.size(2) != size) {
      if (!resize) {
        throw ShapeError("image " + f + " is " + std::to_string(img.size(1)) +
                         "x" + std::to_string(img.size(2)) + ", expected " +
                         std::to_string(size) + " (pass the resize flag)");
      }
      img = center_crop_resize(img, size);
    }
    tensors.push_back(img);
    set.names.push_back(std::filesystem::path(f).stem().string());
  }
  if (!tensors.empty()) {
    set.images = torch::stack(tensors, 0);
  }
  return set;
}

}  // namespace selfrec
