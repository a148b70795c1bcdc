#include "selfrec/localize.hpp"

namespace selfrec {

namespace {

torch::nn::Conv2d conv3(int in, int out) {
  return torch::nn::Conv2d(
      torch::nn::Conv2dOptions(in, out, 3).padding(1).bias(true));
}

torch::nn::ConvTranspose2d up2x(int in, int out) {
  return torch::nn::ConvTranspose2d(
      torch::nn::ConvTranspose2dOptions(in, out, 2).stride(2));
}

torch::Tensor lrelu(const torch::Tensor& t) { return torch::leaky_relu(t, 0.2); }

}  // namespace

LocalizerImpl::LocalizerImpl(TLOptions opts) : opts_(opts) {
  const int w = opts_.base_width;
  e1a = register_module("e1a", conv3(opts_.in_channels, w));
  e1b = register_module("e1b", conv3(w, w));
  e2a = register_module("e2a", conv3(w, 2 * w));
  e2b = register_module("e2b", conv3(2 * w, 2 * w));
  e3a = register_module("e3a", conv3(2 * w, 4 * w));
  e3b = register_module("e3b", conv3(4 * w, 4 * w));
  ba = register_module("ba", conv3(4 * w, 8 * w));
  bb = register_module("bb", conv3(8 * w, 8 * w));
  u3 = register_module("u3", up2x(8 * w, 4 * w));
  d3a = register_module("d3a", conv3(8 * w, 4 * w));
  d3b = register_module("d3b", conv3(4 * w, 4 * w));
  u2 = register_module("u2", up2x(4 * w, 2 * w));
  d2a = register_module("d2a", conv3(4 * w, 2 * w));
  d2b = register_module("d2b", conv3(2 * w, 2 * w));
  u1 = register_module("u1", up2x(2 * w, w));
  d1a = register_module("d1a", conv3(2 * w, w));
  d1b = register_module("d1b", conv3(w, w));
  out_conv = register_module("out_conv",
                             torch::nn::Conv2d(torch::nn::Conv2dOptions(w, 1, 1)));
}

torch::Tensor LocalizerImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(1) != opts_.in_channels) {
    throw ShapeError("localizer expects (N," +
                     std::to_string(opts_.in_channels) + ",H,W)");
  }
  if (x.size(2) % 8 != 0 || x.size(3) % 8 != 0) {
    throw ShapeError("localizer needs spatial dims divisible by 8");
  }
  namespace F = torch::nn::functional;
  auto pool = [](const torch::Tensor& t) {
    return F::max_pool2d(t, F::MaxPool2dFuncOptions(2));
  };
  auto s1 = lrelu(e1b(lrelu(e1a(x))));
  auto s2 = lrelu(e2b(lrelu(e2a(pool(s1)))));
  auto s3 = lrelu(e3b(lrelu(e3a(pool(s2)))));
  auto b = lrelu(bb(lrelu(ba(pool(s3)))));
  auto y = lrelu(d3b(lrelu(d3a(torch::cat({u3(b), s3}, 1)))));
  y = lrelu(d2b(lrelu(d2a(torch::cat({u2(y), s2}, 1)))));
  y = lrelu(d1b(lrelu(d1a(torch::cat({u1(y), s1}, 1)))));
  return torch::sigmoid(out_conv(y)).squeeze(1);
}

torch::Tensor binarize_mask(const torch::Tensor& soft, double thr) {
  return (soft >= thr).to(soft.dtype());
}

torch::Tensor composite(const torch::Tensor& fg, const torch::Tensor& bg,
                        const torch::Tensor& mask) {
  if (fg.sizes() != bg.sizes()) {
    throw ShapeError("composite inputs must match");
  }
  auto m = mask;
  if (fg.dim() == m.dim() + 1) {
    m = m.unsqueeze(fg.dim() - 3);  // slot the channel axis in
  }
  if (m.dim() != fg.dim() || m.size(-1) != fg.size(-1) ||
      m.size(-2) != fg.size(-2)) {
    throw ShapeError("composite mask does not match the image grid");
  }
  return m * fg + (1.0 - m) * bg;
}

torch::Tensor bce_loss(const torch::Tensor& soft, const torch::Tensor& truth,
                       double eps) {
  if (soft.sizes() != truth.sizes()) {
    throw ShapeError("bce_loss inputs must match");
  }
  auto p = torch::clamp(soft, eps, 1.0 - eps);
  return -(truth * torch::log(p) + (1.0 - truth) * torch::log(1.0 - p)).mean();
}

}  // namespace selfrec
