// Deterministic synthetic image corpus: smooth color fields with soft blobs
// and low-frequency texture, plus simple shapes for the structured split.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "selfrec/common.hpp"
#include "selfrec/image_io.hpp"

namespace fs = std::filesystem;
using namespace selfrec;

namespace {

torch::Tensor coords(int64_t size) {
  auto ax = torch::arange(size, torch::kFloat) / double(size - 1);
  return ax;
}

// smooth base: oriented gradient + a few gaussian blobs + low-order cosines
torch::Tensor smooth_image(int64_t size, SplitMix64& rng) {
  auto x = coords(size).unsqueeze(0).expand({size, size});
  auto y = coords(size).unsqueeze(1).expand({size, size});
  auto img = torch::zeros({3, size, size}, torch::kFloat);
  for (int c = 0; c < 3; ++c) {
    const double gx = rng.next_in(-0.6, 0.6);
    const double gy = rng.next_in(-0.6, 0.6);
    const double base = rng.next_in(0.25, 0.75);
    auto plane = base + gx * (x - 0.5) + gy * (y - 0.5);
    const int blobs = int(rng.next_int(1, 3));
    for (int b = 0; b < blobs; ++b) {
      const double cx = rng.next_in(0.15, 0.85);
      const double cy = rng.next_in(0.15, 0.85);
      const double s = rng.next_in(0.08, 0.3);
      const double amp = rng.next_in(-0.35, 0.35);
      plane = plane +
              amp * torch::exp(-((x - cx).pow(2) + (y - cy).pow(2)) / (2 * s * s));
    }
    const int waves = int(rng.next_int(0, 2));
    for (int wv = 0; wv < waves; ++wv) {
      const double fx = rng.next_in(0.5, 2.5);
      const double fy = rng.next_in(0.5, 2.5);
      const double ph = rng.next_in(0, 6.283);
      const double amp = rng.next_in(-0.12, 0.12);
      plane = plane + amp * torch::cos(2 * M_PI * (fx * x + fy * y) + ph);
    }
    img[c] = plane;
  }
  return torch::clamp(img, 0.0, 1.0);
}

void add_rect(torch::Tensor& img, SplitMix64& rng) {
  const auto size = img.size(1);
  const int64_t w = rng.next_int(size / 6, size / 2);
  const int64_t h = rng.next_int(size / 6, size / 2);
  const int64_t x0 = rng.next_int(0, size - w - 1);
  const int64_t y0 = rng.next_int(0, size - h - 1);
  for (int c = 0; c < 3; ++c) {
    const double v = rng.next_in(0.05, 0.95);
    const double blend = rng.next_in(0.55, 0.95);
    auto region = img[c].narrow(0, y0, h).narrow(1, x0, w);
    region.mul_(1.0 - blend).add_(blend * v);
  }
}

void add_disk(torch::Tensor& img, SplitMix64& rng) {
  const auto size = img.size(1);
  auto x = coords(size).unsqueeze(0).expand({size, size});
  auto y = coords(size).unsqueeze(1).expand({size, size});
  const double cx = rng.next_in(0.2, 0.8);
  const double cy = rng.next_in(0.2, 0.8);
  const double r = rng.next_in(0.08, 0.28);
  auto inside = (((x - cx).pow(2) + (y - cy).pow(2)) <= r * r).to(torch::kFloat);
  for (int c = 0; c < 3; ++c) {
    const double v = rng.next_in(0.05, 0.95);
    const double blend = rng.next_in(0.55, 0.95);
    img[c] = img[c] * (1.0 - blend * inside) + blend * v * inside;
  }
}

torch::Tensor structured_image(int64_t size, SplitMix64& rng) {
  auto img = smooth_image(size, rng);
  const int shapes = int(rng.next_int(1, 4));
  for (int s = 0; s < shapes; ++s) {
    if (rng.next_below(2) == 0) {
      add_rect(img, rng);
    } else {
      add_disk(img, rng);
    }
  }
  // faint texture so recovery has detail to reproduce
  const double amp = rng.next_in(0.0, 0.03);
  auto gen = at::detail::createCPUGenerator();
  gen.set_current_seed(rng.next());
  img = img + amp * torch::randn({3, size, size}, gen, torch::kFloat);
  return torch::clamp(img, 0.0, 1.0);
}

void write_split(const std::string& dir, const std::string& prefix, int count,
                 int64_t size, bool smooth, SplitMix64& rng) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    auto img = smooth ? smooth_image(size, rng) : structured_image(size, rng);
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03d.png", prefix.c_str(), i);
    save_image(img, (fs::path(dir) / name).string());
  }
  std::cout << dir << ": " << count << " images\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the bundled synthetic corpora"};
  std::string out_dir = "data";
  int64_t size = 64;
  uint64_t seed = 7;
  int train_count = 200, val_count = 50, smooth_count = 20;
  app.add_option("--out", out_dir, "corpus root directory");
  app.add_option("--size", size, "image side length");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--train", train_count, "training split size");
  app.add_option("--val", val_count, "validation split size");
  app.add_option("--smooth", smooth_count, "smooth split size");
  CLI11_PARSE(app, argc, argv);

  SplitMix64 rng(seed);
  write_split(out_dir + "/train", "img", train_count, size, false, rng);
  write_split(out_dir + "/val", "img", val_count, size, false, rng);
  write_split(out_dir + "/smooth", "smooth", smooth_count, size, true, rng);
  return 0;
}
