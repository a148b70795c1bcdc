#include "selfrec/subnets.hpp"

#include <cmath>

namespace selfrec {

namespace {

torch::nn::Conv2d make_conv(int in, int out) {
  return torch::nn::Conv2d(
      torch::nn::Conv2dOptions(in, out, 3).padding(1).bias(true));
}

void kaiming_init(torch::nn::Conv2d& c, double slope) {
  torch::NoGradGuard ng;
  torch::nn::init::kaiming_normal_(
      c->weight, slope, torch::kFanIn, torch::kLeakyReLU);
  torch::nn::init::zeros_(c->bias);
}

void zero_init(torch::nn::Conv2d& c) {
  torch::NoGradGuard ng;
  torch::nn::init::zeros_(c->weight);
  torch::nn::init::zeros_(c->bias);
}

// transposed conv that scales the spatial dims by exactly `stride`
torch::nn::ConvTranspose2d make_up(int in, int out, int stride) {
  if (stride == 1) {
    return torch::nn::ConvTranspose2d(
        torch::nn::ConvTranspose2dOptions(in, out, 3).stride(1).padding(1));
  }
  return torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(
      in, out, 2 * stride).stride(stride).padding(stride / 2));
}

std::pair<int, int> split_factor(int p) {
  switch (p) {
    case 1: return {1, 1};
    case 2: return {2, 1};
    case 4: return {2, 2};
    case 8: return {4, 2};
    case 16: return {4, 4};
    default:
      throw ConfigError("transformer subnet patch must be one of 1,2,4,8,16");
  }
}

}  // namespace

DenseSubnetImpl::DenseSubnetImpl(int in_channels, int out_channels, int hidden) {
  conv1 = register_module("conv1", make_conv(in_channels, hidden));
  conv2 = register_module("conv2", make_conv(in_channels + hidden, hidden));
  conv3 = register_module("conv3", make_conv(in_channels + 2 * hidden, hidden));
  conv4 = register_module("conv4", make_conv(in_channels + 3 * hidden, hidden));
  conv5 = register_module("conv5",
                          make_conv(in_channels + 4 * hidden, out_channels));
  kaiming_init(conv1, slope);
  kaiming_init(conv2, slope);
  kaiming_init(conv3, slope);
  kaiming_init(conv4, slope);
  zero_init(conv5);
}

torch::Tensor DenseSubnetImpl::forward(const torch::Tensor& x) {
  namespace F = torch::nn::functional;
  auto act = F::LeakyReLUFuncOptions().negative_slope(slope);
  auto h1 = F::leaky_relu(conv1(x), act);
  auto h2 = F::leaky_relu(conv2(torch::cat({x, h1}, 1)), act);
  auto h3 = F::leaky_relu(conv3(torch::cat({x, h1, h2}, 1)), act);
  auto h4 = F::leaky_relu(conv4(torch::cat({x, h1, h2, h3}, 1)), act);
  return conv5(torch::cat({x, h1, h2, h3, h4}, 1));
}

TransformerSubnetImpl::TransformerSubnetImpl(TransformerSubnetOptions opts)
    : opts_(opts) {
  const int d = opts_.embed_dim;
  if (d % opts_.heads != 0 || d % 2 != 0) {
    throw ConfigError("transformer embed dim must be even and divisible by heads");
  }
  const int pd = opts_.channels * opts_.patch * opts_.patch;
  patch_embed = register_module("patch_embed", torch::nn::Linear(pd, d));
  qkv = register_module("qkv", torch::nn::Linear(d, 3 * d));
  attn_out = register_module("attn_out", torch::nn::Linear(d, d));
  norm1 = register_module(
      "norm1", torch::nn::LayerNorm(torch::nn::LayerNormOptions({d})));
  norm2 = register_module(
      "norm2", torch::nn::LayerNorm(torch::nn::LayerNormOptions({d})));
  mlp_in = register_module("mlp_in", torch::nn::Linear(d, opts_.mlp_dim));
  mlp_out = register_module("mlp_out", torch::nn::Linear(opts_.mlp_dim, d));

  // two upsamplers whose strides compose back to one pixel per input pixel
  auto [s1, s2] = split_factor(opts_.patch);
  const int mid = std::max(d / 4, opts_.channels);
  up1 = register_module("up1", make_up(d, mid, s1));
  up2 = register_module("up2", make_up(mid, opts_.channels, s2));
  {
    torch::NoGradGuard ng;
    torch::nn::init::zeros_(up2->weight);
    torch::nn::init::zeros_(up2->bias);
  }
}

torch::Tensor TransformerSubnetImpl::positional_encoding(
    int64_t tokens, const torch::TensorOptions& o) {
  const int d = opts_.embed_dim;
  auto pos = torch::arange(tokens, o).unsqueeze(1);
  auto i = torch::arange(d / 2, o).unsqueeze(0);
  auto angle = pos * torch::exp(i * (-std::log(10000.0) * 2.0 / d));
  auto pe = torch::zeros({tokens, d}, o);
  using namespace torch::indexing;
  pe.index_put_({Slice(), Slice(0, None, 2)}, torch::sin(angle));
  pe.index_put_({Slice(), Slice(1, None, 2)}, torch::cos(angle));
  return pe;
}

torch::Tensor TransformerSubnetImpl::forward(const torch::Tensor& x) {
  const auto n = x.size(0);
  const auto c = x.size(1);
  const auto h = x.size(2);
  const auto w = x.size(3);
  const int p = opts_.patch;
  if (h % p != 0 || w % p != 0) {
    throw ShapeError("transformer subnet: spatial dims must be divisible by patch");
  }
  const auto gh = h / p;
  const auto gw = w / p;
  const int d = opts_.embed_dim;
  const int heads = opts_.heads;
  const int hd = d / heads;

  // (N,C,H,W) -> (N, gh*gw, C*p*p)
  auto t = x.reshape({n, c, gh, p, gw, p})
               .permute({0, 2, 4, 1, 3, 5})
               .reshape({n, gh * gw, c * p * p});
  t = patch_embed(t);
  t = t + positional_encoding(gh * gw, t.options());

  // single post-norm encoder layer
  auto qkv_all =
      qkv(t).reshape({n, gh * gw, 3, heads, hd}).permute({2, 0, 3, 1, 4});
  auto q = qkv_all[0], k = qkv_all[1], v = qkv_all[2];
  auto attn = torch::softmax(
      torch::matmul(q, k.transpose(-2, -1)) / std::sqrt(double(hd)), -1);
  auto ctx =
      torch::matmul(attn, v).permute({0, 2, 1, 3}).reshape({n, gh * gw, d});
  t = norm1(t + attn_out(ctx));
  t = norm2(t + mlp_out(torch::gelu(mlp_in(t))));

  // tokens back to a map, then upsample to the input resolution
  auto m = t.transpose(1, 2).reshape({n, d, gh, gw});
  auto y = torch::leaky_relu(up1(m), 0.2);
  return up2(y);
}

}  // namespace selfrec
