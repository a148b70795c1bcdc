#include "selfrec/pipeline.hpp"

namespace selfrec {

PipelineImpl::PipelineImpl(const ModelConfig& cfg, int64_t image_size)
    : cfg_(cfg), image_size_(image_size) {
  if (image_size % 8 != 0) {
    throw ConfigError("pipeline image size must be divisible by 8");
  }
  if (cfg_.use_wg) {
    WGOptions wo;
    wo.blocks = cfg_.wg_blocks;
    wo.patch = cfg_.wg_patch;
    wo.embed_dim = cfg_.wg_embed_dim;
    wo.heads = cfg_.wg_heads;
    wg = register_module("wg", SecretGenerator(wo));
  }
  IWOptions io;
  io.blocks = cfg_.iw_blocks;
  io.hidden = cfg_.hidden_width;
  iw = register_module("iw", Watermarker(io));
  if (cfg_.use_ie) {
    IEOptions eo;
    eo.depth = cfg_.ie_depth;
    eo.width = cfg_.ie_width;
    ie = register_module("ie", Enhancer(eo));
  }
  TLOptions to;
  to.base_width = cfg_.tl_base_width;
  tl = register_module("tl", Localizer(to));
  if (cfg_.use_shuffle) {
    shuffler_.emplace(ShuffleKey{cfg_.shuffle_seed, cfg_.shuffle_patch},
                      image_size, image_size);
  }
}

torch::Tensor PipelineImpl::make_secret(const torch::Tensor& org) {
  return cfg_.use_wg ? wg->generate(org) : org;
}

torch::Tensor PipelineImpl::shuffle_frame(const torch::Tensor& t) const {
  return shuffler_ ? shuffler_->apply(t) : t;
}

torch::Tensor PipelineImpl::unshuffle_frame(const torch::Tensor& t) const {
  return shuffler_ ? shuffler_->undo(t) : t;
}

EmbedOutputs PipelineImpl::embed(const torch::Tensor& org) {
  EmbedOutputs out;
  bool was_3d = false;
  auto img = detail::as_batched(org, was_3d);
  out.secret = make_secret(img);
  out.secret_shuffled = shuffle_frame(out.secret);
  std::tie(out.container, out.residual) = iw->embed(img, out.secret_shuffled);
  if (was_3d) {
    for (torch::Tensor* t : {&out.secret, &out.secret_shuffled, &out.container,
                             &out.residual}) {
      *t = t->squeeze(0);
    }
  }
  return out;
}

RecoverOutputs PipelineImpl::recover(const torch::Tensor& attacked,
                                     bool soft_composite) {
  RecoverOutputs out;
  bool was_3d = false;
  auto att = detail::as_batched(attacked, was_3d);
  out.residual_est = iw->estimate_residual(att, cfg_.noise_mode);
  std::tie(out.cover_est, out.secret_shuffled_est) =
      iw->extract(att, out.residual_est);
  out.secret_est = unshuffle_frame(out.secret_shuffled_est);
  out.coarse = cfg_.use_wg ? wg->invert(out.secret_est) : out.secret_est;
  out.enhanced = cfg_.use_ie ? ie(out.coarse) : out.coarse;
  out.soft_mask = tl(torch::cat({att, out.secret_shuffled_est}, 1));
  out.mask = binarize_mask(out.soft_mask);
  auto blend = soft_composite ? out.soft_mask : out.mask;
  out.recovered =
      torch::clamp(composite(out.enhanced, att, blend), 0.0, 1.0);
  if (was_3d) {
    for (torch::Tensor* t :
         {&out.residual_est, &out.cover_est, &out.secret_shuffled_est,
          &out.secret_est, &out.coarse, &out.enhanced, &out.soft_mask,
          &out.mask, &out.recovered}) {
      *t = t->squeeze(0);
    }
  }
  return out;
}

}  // namespace selfrec
