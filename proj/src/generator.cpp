#include "selfrec/generator.hpp"

namespace selfrec {

namespace {

CouplingBlock make_transformer_coupling(const WGOptions& o) {
  TransformerSubnetOptions t;
  t.channels = 3;
  t.patch = o.patch;
  t.embed_dim = o.embed_dim;
  t.heads = o.heads;
  t.mlp_dim = 2 * o.embed_dim;
  return CouplingBlock(torch::nn::AnyModule(TransformerSubnet(t)),
                       torch::nn::AnyModule(TransformerSubnet(t)),
                       torch::nn::AnyModule(TransformerSubnet(t)));
}

}  // namespace

SecretGeneratorImpl::SecretGeneratorImpl(WGOptions opts) : opts_(opts) {
  std::vector<CouplingBlock> blocks;
  for (int i = 0; i < opts_.blocks; ++i) {
    blocks.push_back(make_transformer_coupling(opts_));
  }
  inn = register_module("inn", InnStack(std::move(blocks)));
}

torch::Tensor SecretGeneratorImpl::generate(const torch::Tensor& image) {
  bool was_3d = false;
  auto x = detail::as_batched(image, was_3d);
  auto [sec, aux] = inn->forward(x, x);
  (void)aux;  // second branch is not embedded anywhere, drop it
  return detail::restore_rank(sec, was_3d);
}

torch::Tensor SecretGeneratorImpl::invert(const torch::Tensor& secret) {
  bool was_3d = false;
  auto y = detail::as_batched(secret, was_3d);
  auto [img, aux] = inn->inverse(y, y);
  (void)aux;
  return detail::restore_rank(img, was_3d);
}

torch::Tensor tv_loss(const torch::Tensor& img, TvReduction reduction) {
  bool was_3d = false;
  auto x = detail::as_batched(img, was_3d);
  const auto h = x.size(2), w = x.size(3);
  if (h < 2 || w < 2) {
    throw ShapeError("tv_loss needs at least a 2x2 image");
  }
  using namespace torch::indexing;
  auto core = x.index({Slice(), Slice(), Slice(0, h - 1), Slice(0, w - 1)});
  auto right = x.index({Slice(), Slice(), Slice(0, h - 1), Slice(1, w)});
  auto down = x.index({Slice(), Slice(), Slice(1, h), Slice(0, w - 1)});
  auto total = (right - core).pow(2).sum() + (down - core).pow(2).sum();
  if (reduction == TvReduction::kMean) {
    total = total / double(2 * x.size(0) * x.size(1) * (h - 1) * (w - 1));
  }
  return total;
}

}  // namespace selfrec
