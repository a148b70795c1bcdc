#include "selfrec/trainer.hpp"

#include <cinttypes>
#include <cstdio>

namespace selfrec {

std::string format_record(const StepRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "iter=%" PRId64
                " w=%.9e e=%.9e tv=%.9e wg=%.9e ie=%.9e tl=%.9e noise=%.9e "
                "total=%.9e",
                r.iteration, r.l_w, r.l_e, r.l_tv, r.l_wg, r.l_ie, r.l_tl,
                r.l_noise, r.total);
  return buf;
}

Trainer::Trainer(const RunConfig& cfg, ImageSet train_set, PerceptualHook hook)
    : cfg_(cfg),
      data_(std::move(train_set)),
      rng_(cfg.train.seed ^ 0xD1B54A32D192ED03ULL),
      preset_(preset_by_name(cfg.train.degradation_preset)),
      hook_(std::move(hook)) {
  if (data_.size() == 0) {
    throw ConfigError("training set is empty");
  }
  torch::manual_seed(int64_t(cfg_.train.seed));
  pipeline_ = Pipeline(cfg_.model, cfg_.data.image_size);
  opt_ = std::make_unique<torch::optim::Adam>(
      pipeline_->parameters(),
      torch::optim::AdamOptions(cfg_.train.lr)
          .betas({cfg_.train.beta1, cfg_.train.beta2}));
}

void Trainer::take_snapshot() {
  torch::NoGradGuard ng;
  snapshot_.clear();
  for (const auto& p : pipeline_->parameters()) {
    snapshot_.push_back(p.detach().clone());
  }
}

void Trainer::restore_snapshot() {
  torch::NoGradGuard ng;
  auto params = pipeline_->parameters();
  for (size_t i = 0; i < params.size() && i < snapshot_.size(); ++i) {
    params[i].copy_(snapshot_[i]);
  }
}

StepRecord Trainer::step() {
  take_snapshot();
  try {
    const auto& m = cfg_.model;
    const auto& t = cfg_.train;
    const int64_t n = data_.size();
    const int64_t b = std::min<int64_t>(t.batch_size, n);
    const int64_t size = cfg_.data.image_size;

    // sample the batch, its donors and its masks
    std::vector<int64_t> idx(static_cast<size_t>(b)), didx(static_cast<size_t>(b));
    std::vector<torch::Tensor> mask_list;
    for (int64_t i = 0; i < b; ++i) {
      idx[size_t(i)] = int64_t(rng_.next_below(uint64_t(n)));
      didx[size_t(i)] = n > 1 ? (idx[size_t(i)] + 1 +
                                 int64_t(rng_.next_below(uint64_t(n - 1)))) %
                                    n
                              : 0;
      mask_list.push_back(generate_mask(t.mask, size, size, rng_));
    }
    auto org = data_.images.index_select(0, torch::tensor(idx, torch::kInt64));
    auto donor =
        data_.images.index_select(0, torch::tensor(didx, torch::kInt64));
    auto mask = torch::stack(mask_list, 0);

    // embed
    auto secret = pipeline_->make_secret(org);
    auto s_sec = pipeline_->shuffle_frame(secret);
    auto [container, residual] = pipeline_->iw->embed(org, s_sec);

    // common degradation on the container, then the splice attack
    torch::Tensor degraded;
    if (preset_.menu.empty()) {
      degraded = container;
    } else {
      std::vector<torch::Tensor> per_sample;
      for (int64_t i = 0; i < b; ++i) {
        per_sample.push_back(
            random_degradation(container[i], preset_, rng_, true).first);
      }
      degraded = torch::stack(per_sample, 0);
    }
    auto attacked = splice(degraded, donor, mask);

    // extract and rebuild
    auto residual_est = pipeline_->iw->estimate_residual(attacked, m.noise_mode);
    auto [cover_est, s_sec_est] = pipeline_->iw->extract(attacked, residual_est);
    auto secret_est = pipeline_->unshuffle_frame(s_sec_est);
    auto coarse = m.use_wg ? pipeline_->wg->invert(secret_est) : secret_est;
    auto enhanced = m.use_ie ? pipeline_->ie(coarse) : coarse;
    auto soft = pipeline_->tl(torch::cat({attacked, s_sec_est}, 1));

    auto zero = torch::zeros({}, org.options());
    std::array<torch::Tensor, 6> parts = {
        loss_w(container, org, hook_, t.weights.perceptual),
        loss_e(s_sec, s_sec_est, mask),
        m.use_wg ? tv_loss(s_sec, TvReduction::kMean) : zero,
        m.use_wg ? torch::mean(torch::pow(coarse - org, 2)) : zero,
        m.use_ie ? loss_w(enhanced, org, hook_, t.weights.perceptual) : zero,
        bce_loss(soft, mask)};
    auto total = loss_total(parts, t.weights);

    StepRecord rec;
    if (t.noise_supervision && m.noise_mode == NoiseMode::kLearned) {
      auto l_noise =
          torch::mean(torch::pow(residual_est - residual.detach(), 2));
      total = total + t.lambda_noise * l_noise;
      rec.l_noise = l_noise.item<double>();
    }
    if (!torch::isfinite(total).item<bool>()) {
      throw NumericError("non-finite total loss");
    }

    opt_->zero_grad();
    total.backward();
    opt_->step();

    iteration_ += 1;
    rec.iteration = iteration_;
    rec.l_w = parts[0].item<double>();
    rec.l_e = parts[1].item<double>();
    rec.l_tv = parts[2].item<double>();
    rec.l_wg = parts[3].item<double>();
    rec.l_ie = parts[4].item<double>();
    rec.l_tl = parts[5].item<double>();
    rec.total = total.item<double>();
    return rec;
  } catch (const NumericError&) {
    restore_snapshot();
    throw;
  }
}

void Trainer::save(const std::string& path) const {
  save_checkpoint(pipeline_, cfg_, iteration_, path);
}

void Trainer::save_snapshot(const std::string& path) const {
  // write the pre-step parameters without disturbing the live model
  Pipeline copy(cfg_.model, cfg_.data.image_size);
  torch::NoGradGuard ng;
  auto params = copy->parameters();
  auto live = pipeline_->parameters();
  for (size_t i = 0; i < params.size(); ++i) {
    params[i].copy_(i < snapshot_.size() ? snapshot_[i] : live[i]);
  }
  save_checkpoint(copy, cfg_, iteration_, path);
}

}  // namespace selfrec
