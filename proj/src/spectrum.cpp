#include "selfrec/spectrum.hpp"

#include <torch/fft.h>

namespace selfrec {

namespace {

torch::Tensor grayscale(const torch::Tensor& img) {
  if (img.dim() != 3) {
    throw ShapeError("spectrum ops take a single (C,H,W) image");
  }
  return img.mean(0);
}

}  // namespace

torch::Tensor fft_magnitude_spectrum(const torch::Tensor& img) {
  auto g = grayscale(img).to(torch::kDouble);
  auto spec = torch::fft::fft2(g);
  return torch::abs(torch::fft::fftshift(spec));
}

torch::Tensor fft_log_spectrum_image(const torch::Tensor& img) {
  auto mag = torch::log1p(fft_magnitude_spectrum(img));
  auto lo = mag.min();
  auto hi = mag.max();
  auto span = (hi - lo).clamp_min(1e-12);
  return ((mag - lo) / span).to(torch::kFloat);
}

double high_frequency_ratio(const torch::Tensor& img, double cutoff) {
  auto mag = fft_magnitude_spectrum(img);
  const auto h = mag.size(0), w = mag.size(1);
  const int64_t cy = h / 2, cx = w / 2;

  auto ys = torch::arange(h, torch::kDouble) - double(cy);
  auto xs = torch::arange(w, torch::kDouble) - double(cx);
  auto r2 = ys.pow(2).unsqueeze(1) + xs.pow(2).unsqueeze(0);
  const double radius = cutoff * double(std::min(h, w)) / 2.0;

  auto energy = mag.pow(2);
  const double dc = energy.index({cy, cx}).item<double>();
  const double total = energy.sum().item<double>() - dc;
  // fft rounding noise on a (near-)constant image scales with the dc energy
  if (total <= 1e-24 || total <= 1e-18 * dc) {
    return 0.0;
  }
  const double outside =
      energy.masked_select(r2 > radius * radius).sum().item<double>();
  return outside / total;
}

}  // namespace selfrec
