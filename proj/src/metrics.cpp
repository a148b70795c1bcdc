#include "selfrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace selfrec {

namespace {

constexpr double kPsnrCap = 100.0;

torch::Tensor gaussian_window(int size, double sigma) {
  auto ax = torch::arange(size, torch::kDouble) - double(size - 1) / 2.0;
  auto g = torch::exp(-(ax * ax) / (2.0 * sigma * sigma));
  auto k = torch::outer(g, g);
  return k / k.sum();
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << *v;
  return os.str();
}

}  // namespace

std::optional<double> psnr(const torch::Tensor& a, const torch::Tensor& b,
                           const std::optional<torch::Tensor>& mask) {
  if (a.sizes() != b.sizes()) {
    throw ShapeError("psnr inputs must match");
  }
  auto x = a.to(torch::kDouble), y = b.to(torch::kDouble);
  double mse = 0.0;
  if (mask) {
    auto m = *mask;
    if (x.dim() == m.dim() + 1) {
      m = m.unsqueeze(x.dim() - 3);
    }
    auto keep = (m >= 0.5).to(torch::kDouble).expand_as(x);
    const double count = keep.sum().item<double>();
    if (count == 0.0) {
      return std::nullopt;
    }
    mse = (torch::pow(x - y, 2) * keep).sum().item<double>() / count;
  } else {
    mse = torch::mean(torch::pow(x - y, 2)).item<double>();
  }
  if (mse <= 0.0) {
    return kPsnrCap;
  }
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const torch::Tensor& a, const torch::Tensor& b) {
  if (a.sizes() != b.sizes()) {
    throw ShapeError("ssim inputs must match");
  }
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;

  bool was_3d = false;
  auto xa = detail::as_batched(a, was_3d).to(torch::kDouble).mean(1, true);
  auto xb = detail::as_batched(b, was_3d).to(torch::kDouble).mean(1, true);
  if (xa.size(2) < kWin || xa.size(3) < kWin) {
    throw ConfigError("ssim needs images of at least 11x11");
  }
  namespace F = torch::nn::functional;
  auto w = gaussian_window(kWin, kSigma).reshape({1, 1, kWin, kWin});
  auto filt = [&](const torch::Tensor& t) {
    return F::conv2d(t, w, F::Conv2dFuncOptions());
  };
  auto mu_a = filt(xa);
  auto mu_b = filt(xb);
  auto mu_aa = mu_a * mu_a, mu_bb = mu_b * mu_b, mu_ab = mu_a * mu_b;
  auto var_a = filt(xa * xa) - mu_aa;
  auto var_b = filt(xb * xb) - mu_bb;
  auto cov = filt(xa * xb) - mu_ab;
  auto map = ((2.0 * mu_ab + c1) * (2.0 * cov + c2)) /
             ((mu_aa + mu_bb + c1) * (var_a + var_b + c2));
  return map.mean().item<double>();
}

namespace {

struct Counts {
  double tp = 0, fp = 0, fn = 0;
};

Counts overlap_counts(const torch::Tensor& pred, const torch::Tensor& truth) {
  if (pred.sizes() != truth.sizes()) {
    throw ShapeError("mask metric inputs must match");
  }
  auto p = pred >= 0.5;
  auto t = truth >= 0.5;
  Counts c;
  c.tp = (p & t).sum().item<double>();
  c.fp = (p & ~t).sum().item<double>();
  c.fn = (~p & t).sum().item<double>();
  return c;
}

}  // namespace

double iou(const torch::Tensor& pred, const torch::Tensor& truth) {
  auto c = overlap_counts(pred, truth);
  const double uni = c.tp + c.fp + c.fn;
  if (uni == 0.0) {
    return 1.0;  // neither mask marks anything
  }
  return c.tp / uni;
}

double f1(const torch::Tensor& pred, const torch::Tensor& truth) {
  auto c = overlap_counts(pred, truth);
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  if (denom == 0.0) {
    return 1.0;
  }
  return 2.0 * c.tp / denom;
}

std::optional<double> auc(const torch::Tensor& scores,
                          const torch::Tensor& truth) {
  if (scores.numel() != truth.numel()) {
    throw ShapeError("auc inputs must match");
  }
  auto s = scores.reshape(-1).to(torch::kDouble);
  auto t = (truth.reshape(-1) >= 0.5);
  const int64_t n = s.numel();
  const int64_t pos = t.sum().item<int64_t>();
  const int64_t neg = n - pos;
  if (pos == 0 || neg == 0) {
    return std::nullopt;
  }
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto sa = s.accessor<double, 1>();
  auto ta = t.accessor<bool, 1>();
  std::sort(order.begin(), order.end(),
            [&](int64_t i, int64_t j) { return sa[i] < sa[j]; });
  // average ranks across ties
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && sa[order[j + 1]] == sa[order[i]]) ++j;
    const double avg_rank = (double(i + 1) + double(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) {
      if (ta[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - double(pos) * (double(pos) + 1.0) / 2.0;
  return u / (double(pos) * double(neg));
}

MetricRow MetricReport::means() const {
  MetricRow m;
  m.name = "mean";
  auto fold = [&](auto getter) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : rows) {
      if (auto v = getter(r)) {
        sum += *v;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };
  m.psnr_db = fold([](const MetricRow& r) { return r.psnr_db; });
  m.masked_psnr_db = fold([](const MetricRow& r) { return r.masked_psnr_db; });
  m.ssim_val = fold([](const MetricRow& r) { return r.ssim_val; });
  m.iou_val = fold([](const MetricRow& r) { return r.iou_val; });
  m.f1_val = fold([](const MetricRow& r) { return r.f1_val; });
  m.auc_val = fold([](const MetricRow& r) { return r.auc_val; });
  return m;
}

std::string MetricReport::to_csv() const {
  std::ostringstream os;
  os << "name,psnr_db,masked_psnr_db,ssim,iou,f1,auc,lpips\n";
  auto line = [&](const MetricRow& r) {
    os << r.name << ',' << cell(r.psnr_db) << ',' << cell(r.masked_psnr_db)
       << ',' << cell(r.ssim_val) << ',' << cell(r.iou_val) << ','
       << cell(r.f1_val) << ',' << cell(r.auc_val) << ",unavailable\n";
  };
  // one row per image; the corpus mean lives in the table view
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string MetricReport::to_table() const {
  std::ostringstream os;
  auto line = [&](const MetricRow& r) {
    os << r.name;
    auto put = [&](const char* label, const std::optional<double>& v) {
      os << "  " << label << "=" << (v ? cell(v) : std::string("missing"));
    };
    put("psnr", r.psnr_db);
    put("m-psnr", r.masked_psnr_db);
    put("ssim", r.ssim_val);
    put("iou", r.iou_val);
    put("f1", r.f1_val);
    put("auc", r.auc_val);
    os << "  lpips=unavailable\n";
  };
  for (const auto& r : rows) line(r);
  line(means());
  return os.str();
}

void MetricReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write report: " + path);
  }
  out << to_csv();
}

}  // namespace selfrec
