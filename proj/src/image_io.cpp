#include "selfrec/image_io.hpp"

#include <algorithm>
#include <filesystem>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace selfrec {

namespace {

torch::Tensor round_to_u8(const torch::Tensor& img) {
  auto scaled = torch::clamp(img.to(torch::kDouble), 0.0, 1.0) * 255.0;
  // round half away from zero (values are non-negative here)
  return torch::floor(scaled + 0.5).to(torch::kUInt8);
}

}  // namespace

torch::Tensor load_image(const std::string& path) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw IoError("cannot read image: " + path);
  }
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  auto t = torch::from_blob(rgb.data, {rgb.rows, rgb.cols, 3}, torch::kUInt8);
  return t.permute({2, 0, 1}).to(torch::kFloat).div(255.0).clone();
}

void save_image(const torch::Tensor& img, const std::string& path) {
  if (img.dim() != 3 || img.size(0) != 3) {
    throw ShapeError("save_image expects a (3,H,W) tensor");
  }
  auto u8 = round_to_u8(img).permute({1, 2, 0}).contiguous();
  cv::Mat rgb(int(img.size(1)), int(img.size(2)), CV_8UC3, u8.data_ptr());
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path, bgr)) {
    throw IoError("cannot write image: " + path);
  }
}

torch::Tensor load_mask(const std::string& path) {
  cv::Mat gray = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (gray.empty()) {
    throw IoError("cannot read mask: " + path);
  }
  auto t = torch::from_blob(gray.data, {gray.rows, gray.cols}, torch::kUInt8);
  return (t.to(torch::kFloat) >= 128.0).to(torch::kFloat).clone();
}

void save_mask(const torch::Tensor& mask, const std::string& path) {
  if (mask.dim() != 2) {
    throw ShapeError("save_mask expects an (H,W) tensor");
  }
  auto u8 = ((mask >= 0.5).to(torch::kUInt8) * 255).contiguous();
  cv::Mat gray(int(mask.size(0)), int(mask.size(1)), CV_8UC1, u8.data_ptr());
  if (!cv::imwrite(path, gray)) {
    throw IoError("cannot write mask: " + path);
  }
}

torch::Tensor center_crop_resize(const torch::Tensor& img, int64_t size) {
  const auto h = img.size(1), w = img.size(2);
  const auto side = std::min(h, w);
  const auto y0 = (h - side) / 2, x0 = (w - side) / 2;
  auto crop = img.narrow(1, y0, side).narrow(2, x0, side);
  if (side == size) {
    return crop.contiguous();
  }
  namespace F = torch::nn::functional;
  auto out = F::interpolate(crop.unsqueeze(0),
                            F::InterpolateFuncOptions()
                                .size(std::vector<int64_t>{size, size})
                                .mode(torch::kArea));
  return out.squeeze(0).clamp(0.0, 1.0);
}

std::vector<std::string> list_images(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IoError("not a directory: " + dir);
  }
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace selfrec
