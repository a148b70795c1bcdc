#include "selfrec/degrade.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace selfrec {

namespace {

// Annex K quantization tables.
const int kLumaQ[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
const int kChromaQ[64] = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

torch::Tensor quant_table(const int* base, int quality,
                          const torch::TensorOptions& o) {
  quality = std::clamp(quality, 1, 100);
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  auto t = torch::empty({8, 8}, o);
  auto acc = t.accessor<double, 2>();
  for (int i = 0; i < 64; ++i) {
    int q = (base[i] * scale + 50) / 100;
    acc[i / 8][i % 8] = double(std::clamp(q, 1, 255));
  }
  return t;
}

// orthonormal DCT-II basis, rows are basis vectors
torch::Tensor dct_matrix(const torch::TensorOptions& o) {
  auto m = torch::empty({8, 8}, o);
  auto acc = m.accessor<double, 2>();
  for (int k = 0; k < 8; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
    for (int n = 0; n < 8; ++n) {
      acc[k][n] = a * std::cos(M_PI * (2 * n + 1) * k / 16.0);
    }
  }
  return m;
}

torch::Tensor soft_round(const torch::Tensor& x) {
  auto r = torch::round(x);
  auto d = x - r;
  return r + d * d * d;
}

// split (N,1,H,W) into (N*blocks, 8, 8) and back
torch::Tensor to_blocks(const torch::Tensor& plane) {
  const auto n = plane.size(0), h = plane.size(2), w = plane.size(3);
  return plane.reshape({n, h / 8, 8, w / 8, 8})
      .permute({0, 1, 3, 2, 4})
      .reshape({-1, 8, 8});
}

torch::Tensor from_blocks(const torch::Tensor& blocks, int64_t n, int64_t h,
                          int64_t w) {
  return blocks.reshape({n, h / 8, w / 8, 8, 8})
      .permute({0, 1, 3, 2, 4})
      .reshape({n, 1, h, w});
}

torch::Tensor rgb_to_ycbcr(const torch::Tensor& x) {
  // x: (N,3,H,W) on the 0..255 scale, full-range BT.601
  auto r = x.select(1, 0), g = x.select(1, 1), b = x.select(1, 2);
  auto y = 0.299 * r + 0.587 * g + 0.114 * b;
  auto cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
  auto cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
  return torch::stack({y, cb, cr}, 1);
}

torch::Tensor ycbcr_to_rgb(const torch::Tensor& x) {
  auto y = x.select(1, 0), cb = x.select(1, 1) - 128.0,
       cr = x.select(1, 2) - 128.0;
  auto r = y + 1.402 * cr;
  auto g = y - 0.344136 * cb - 0.714136 * cr;
  auto b = y + 1.772 * cb;
  return torch::stack({r, g, b}, 1);
}

torch::Tensor gaussian_kernel(int ksize, double sigma,
                              const torch::TensorOptions& o) {
  auto ax = torch::arange(ksize, o) - double(ksize - 1) / 2.0;
  auto xx = ax.unsqueeze(0), yy = ax.unsqueeze(1);
  auto k = torch::exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma));
  return k / k.sum();
}

torch::Tensor depthwise(const torch::Tensor& x, const torch::Tensor& kernel) {
  namespace F = torch::nn::functional;
  const auto c = x.size(1);
  const auto k = kernel.size(0);
  auto weight = kernel.to(x.dtype()).expand({c, 1, k, k}).contiguous();
  auto padded = F::pad(x, F::PadFuncOptions({(k - 1) / 2, k / 2, (k - 1) / 2,
                                             k / 2}).mode(torch::kReplicate));
  return F::conv2d(padded, weight, F::Conv2dFuncOptions().groups(c));
}

torch::Tensor median3(const torch::Tensor& x, int ksize) {
  namespace F = torch::nn::functional;
  const auto n = x.size(0), c = x.size(1), h = x.size(2), w = x.size(3);
  auto padded = F::pad(x, F::PadFuncOptions({(ksize - 1) / 2, ksize / 2,
                                             (ksize - 1) / 2, ksize / 2})
                              .mode(torch::kReplicate));
  auto windows =
      padded.unfold(2, ksize, 1).unfold(3, ksize, 1).reshape(
          {n, c, h, w, ksize * ksize});
  return std::get<0>(windows.median(-1));
}

torch::Tensor rgb_to_hsv(const torch::Tensor& x) {
  auto r = x.select(1, 0), g = x.select(1, 1), b = x.select(1, 2);
  auto maxc = std::get<0>(x.max(1));
  auto minc = std::get<0>(x.min(1));
  auto v = maxc;
  auto delta = maxc - minc;
  auto s = torch::where(maxc > 0, delta / maxc.clamp_min(1e-12),
                        torch::zeros_like(maxc));
  auto safe = delta.clamp_min(1e-12);
  auto hr = torch::remainder((g - b) / safe, 6.0);
  auto hg = (b - r) / safe + 2.0;
  auto hb = (r - g) / safe + 4.0;
  auto h = torch::where(maxc == r, hr, torch::where(maxc == g, hg, hb)) / 6.0;
  h = torch::where(delta > 0, h, torch::zeros_like(h));
  return torch::stack({h, s, v}, 1);
}

torch::Tensor hsv_to_rgb(const torch::Tensor& x) {
  auto h = torch::remainder(x.select(1, 0), 1.0) * 6.0;
  auto s = x.select(1, 1), v = x.select(1, 2);
  auto i = torch::floor(h);
  auto f = h - i;
  auto p = v * (1.0 - s);
  auto q = v * (1.0 - s * f);
  auto t = v * (1.0 - s * (1.0 - f));
  auto i0 = i == 0, i1 = i == 1, i2 = i == 2, i3 = i == 3, i4 = i == 4;
  auto r = torch::where(i0, v, torch::where(i1, q, torch::where(i2, p,
              torch::where(i3, p, torch::where(i4, t, v)))));
  auto g = torch::where(i0, t, torch::where(i1, v, torch::where(i2, v,
              torch::where(i3, q, torch::where(i4, p, p)))));
  auto b = torch::where(i0, p, torch::where(i1, p, torch::where(i2, t,
              torch::where(i3, v, torch::where(i4, v, q)))));
  return torch::stack({r, g, b}, 1);
}

torch::Generator make_generator(uint64_t seed) {
  auto gen = at::detail::createCPUGenerator();
  gen.set_current_seed(seed);
  return gen;
}

}  // namespace

bool DegradationSpec::differentiable() const {
  switch (kind) {
    case DegradationKind::kMedianFilter:
    case DegradationKind::kHue:
      return false;
    default:
      return true;
  }
}

std::string to_string(DegradationKind k) {
  switch (k) {
    case DegradationKind::kNone: return "none";
    case DegradationKind::kGaussianNoise: return "gaussian_noise";
    case DegradationKind::kJpeg: return "jpeg";
    case DegradationKind::kGaussianFilter: return "gaussian_filter";
    case DegradationKind::kMedianFilter: return "median_filter";
    case DegradationKind::kPoissonNoise: return "poisson_noise";
    case DegradationKind::kHue: return "hue";
    case DegradationKind::kBrightness: return "brightness";
    case DegradationKind::kContrast: return "contrast";
  }
  return "none";
}

DegradationKind degradation_kind_from_string(const std::string& s) {
  for (auto k : {DegradationKind::kNone, DegradationKind::kGaussianNoise,
                 DegradationKind::kJpeg, DegradationKind::kGaussianFilter,
                 DegradationKind::kMedianFilter, DegradationKind::kPoissonNoise,
                 DegradationKind::kHue, DegradationKind::kBrightness,
                 DegradationKind::kContrast}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown degradation kind: " + s);
}

torch::Tensor jpeg_degrade(const torch::Tensor& img, int quality,
                           bool train_mode) {
  bool was_3d = false;
  auto x = detail::as_batched(img, was_3d);
  const auto n = x.size(0), h = x.size(2), w = x.size(3);
  if (x.size(1) != 3) {
    throw ShapeError("jpeg_degrade expects RGB input");
  }
  namespace F = torch::nn::functional;
  const int64_t ph = (8 - h % 8) % 8, pw = (8 - w % 8) % 8;
  if (ph || pw) {
    x = F::pad(x, F::PadFuncOptions({0, pw, 0, ph}).mode(torch::kReplicate));
  }
  const auto hh = x.size(2), ww = x.size(3);

  auto opts = x.options().dtype(torch::kDouble);
  auto ycc = rgb_to_ycbcr(x.to(torch::kDouble) * 255.0) - 128.0;
  auto dct = dct_matrix(opts);
  auto luma_q = quant_table(kLumaQ, quality, opts);
  auto chroma_q = quant_table(kChromaQ, quality, opts);

  std::vector<torch::Tensor> planes;
  for (int c = 0; c < 3; ++c) {
    auto blocks = to_blocks(ycc.narrow(1, c, 1));
    auto coeff = torch::matmul(torch::matmul(dct, blocks), dct.t());
    const auto& q = c == 0 ? luma_q : chroma_q;
    auto scaled = coeff / q;
    auto rounded = train_mode ? soft_round(scaled) : torch::round(scaled);
    auto back = rounded * q;
    auto pixels = torch::matmul(torch::matmul(dct.t(), back), dct);
    planes.push_back(from_blocks(pixels, n, hh, ww));
  }
  auto out = ycbcr_to_rgb(torch::cat(planes, 1) + 128.0) / 255.0;
  out = out.to(img.dtype());
  if (ph || pw) {
    out = out.narrow(2, 0, h).narrow(3, 0, w);
  }
  out = torch::clamp(out, 0.0, 1.0);
  return detail::restore_rank(out, was_3d);
}

torch::Tensor apply_degradation(const torch::Tensor& img,
                                const DegradationSpec& spec, uint64_t seed) {
  bool was_3d = false;
  auto x = detail::as_batched(img, was_3d);
  torch::Tensor out;
  switch (spec.kind) {
    case DegradationKind::kNone:
      out = x;
      break;
    case DegradationKind::kGaussianNoise: {
      if (spec.sigma == 0.0) {
        out = x;
        break;
      }
      auto gen = make_generator(seed);
      auto noise = torch::randn(x.sizes(), gen, x.options());
      out = x + noise * (spec.sigma / 255.0);
      break;
    }
    case DegradationKind::kJpeg:
      out = jpeg_degrade(x, spec.quality, spec.train_mode);
      break;
    case DegradationKind::kGaussianFilter:
      out = depthwise(x, gaussian_kernel(spec.ksize, spec.sigma,
                                         x.options().dtype(torch::kDouble)));
      break;
    case DegradationKind::kMedianFilter:
      out = median3(x, spec.ksize);
      break;
    case DegradationKind::kPoissonNoise: {
      auto gen = make_generator(seed);
      const double scale = 255.0 * spec.alpha;
      auto rate = torch::clamp(x, 0.0, 1.0) * scale;
      out = torch::poisson(rate, gen) / scale;
      break;
    }
    case DegradationKind::kHue: {
      auto hsv = rgb_to_hsv(torch::clamp(x, 0.0, 1.0));
      auto h = torch::remainder(hsv.select(1, 0) + spec.delta, 1.0);
      out = hsv_to_rgb(torch::stack({h, hsv.select(1, 1), hsv.select(1, 2)}, 1));
      break;
    }
    case DegradationKind::kBrightness:
      out = x * spec.factor;
      break;
    case DegradationKind::kContrast: {
      auto mean = x.mean({1, 2, 3}, true);
      out = (x - mean) * spec.factor + mean;
      break;
    }
  }
  out = torch::clamp(out, 0.0, 1.0);
  return detail::restore_rank(out, was_3d);
}

DegradationPreset train_preset() {
  DegradationPreset p;
  p.name = "train";
  p.menu = {
      {.kind = DegradationKind::kGaussianNoise, .lo = 1.0, .hi = 16.0},
      {.kind = DegradationKind::kJpeg, .q_lo = 75, .q_hi = 95},
      {.kind = DegradationKind::kGaussianFilter, .ksize = 3, .sigma = 1.0},
      {.kind = DegradationKind::kMedianFilter, .ksize = 3},
  };
  return p;
}

DegradationPreset eval_preset() {
  DegradationPreset p;
  p.name = "eval";
  p.menu = {
      {.kind = DegradationKind::kGaussianNoise, .lo = 1.0, .hi = 9.0},
      {.kind = DegradationKind::kJpeg, .q_lo = 90, .q_hi = 90},
      {.kind = DegradationKind::kGaussianFilter, .ksize = 3, .sigma = 1.0},
      {.kind = DegradationKind::kMedianFilter, .ksize = 3},
      {.kind = DegradationKind::kPoissonNoise, .lo = 4.0, .hi = 4.0},
      {.kind = DegradationKind::kHue, .lo = -0.1, .hi = 0.1},
      {.kind = DegradationKind::kBrightness, .lo = 0.9, .hi = 1.1},
      {.kind = DegradationKind::kContrast, .lo = 0.7, .hi = 1.3},
  };
  return p;
}

DegradationPreset none_preset() {
  return DegradationPreset{.name = "none", .menu = {}};
}

DegradationPreset preset_by_name(const std::string& name) {
  if (name == "train") return train_preset();
  if (name == "eval") return eval_preset();
  if (name == "none") return none_preset();
  throw ConfigError("unknown degradation preset: " + name);
}

std::pair<torch::Tensor, DegradationSpec> random_degradation(
    const torch::Tensor& img, const DegradationPreset& preset, SplitMix64& rng,
    bool train_mode) {
  DegradationSpec spec;
  spec.train_mode = train_mode;
  if (preset.menu.empty()) {
    return {apply_degradation(img, spec), spec};
  }
  const auto& range = preset.menu[size_t(rng.next_below(preset.menu.size()))];
  spec.kind = range.kind;
  switch (range.kind) {
    case DegradationKind::kGaussianNoise:
      spec.sigma = rng.next_in(range.lo, range.hi);
      break;
    case DegradationKind::kJpeg:
      spec.quality = int(rng.next_int(range.q_lo, range.q_hi));
      break;
    case DegradationKind::kGaussianFilter:
      spec.ksize = range.ksize;
      spec.sigma = range.sigma;
      break;
    case DegradationKind::kMedianFilter:
      spec.ksize = range.ksize;
      break;
    case DegradationKind::kPoissonNoise:
      spec.alpha = rng.next_in(range.lo, range.hi);
      break;
    case DegradationKind::kHue:
      spec.delta = rng.next_in(range.lo, range.hi);
      break;
    case DegradationKind::kBrightness:
    case DegradationKind::kContrast:
      spec.factor = rng.next_in(range.lo, range.hi);
      break;
    case DegradationKind::kNone:
      break;
  }
  const uint64_t seed = rng.next();
  return {apply_degradation(img, spec, seed), spec};
}

namespace {

DegradationRange range_from_json(const nlohmann::json& j) {
  DegradationRange r;
  r.kind = degradation_kind_from_string(j.at("kind").get<std::string>());
  switch (r.kind) {
    case DegradationKind::kGaussianNoise:
    case DegradationKind::kPoissonNoise:
    case DegradationKind::kHue:
    case DegradationKind::kBrightness:
    case DegradationKind::kContrast:
      r.lo = j.at("lo").get<double>();
      r.hi = j.at("hi").get<double>();
      break;
    case DegradationKind::kJpeg:
      r.q_lo = j.at("q_lo").get<int>();
      r.q_hi = j.at("q_hi").get<int>();
      break;
    case DegradationKind::kGaussianFilter:
      r.ksize = j.at("ksize").get<int>();
      r.sigma = j.at("sigma").get<double>();
      break;
    case DegradationKind::kMedianFilter:
      r.ksize = j.at("ksize").get<int>();
      break;
    case DegradationKind::kNone:
      break;
  }
  return r;
}

}  // namespace

std::vector<DegradationPreset> load_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open preset file: " + path);
  }
  nlohmann::json j;
  in >> j;
  std::vector<DegradationPreset> out;
  for (auto& [name, menu] : j.items()) {
    DegradationPreset p;
    p.name = name;
    for (const auto& entry : menu) {
      p.menu.push_back(range_from_json(entry));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace selfrec
