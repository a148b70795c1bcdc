#include "selfrec/evaluate.hpp"

#include "selfrec/masks.hpp"

namespace selfrec {

EvalSummary evaluate_pipeline(Pipeline& pipeline, const RunConfig& cfg,
                              const ImageSet& val, const EvalEmit* emit) {
  if (val.size() == 0) {
    throw ConfigError("evaluation set is empty");
  }
  torch::NoGradGuard ng;
  pipeline->eval();

  SplitMix64 rng(cfg.eval.seed ^ 0xA0761D6478BD642FULL);
  auto preset = preset_by_name(cfg.eval.degradation);
  const bool splicing = cfg.eval.attack == "splice";
  const int64_t n = val.size();
  const int64_t size = pipeline->image_size_;

  EvalSummary out;
  double sum_container = 0, sum_attacked = 0, sum_recovered = 0;
  int64_t count = 0;

  for (int64_t i = 0; i < n; ++i) {
    auto org = val.images[i];
    auto eo = pipeline->embed(org);
    auto container = torch::clamp(eo.container, 0.0, 1.0);

    torch::Tensor true_mask = torch::zeros({size, size}, torch::kFloat);
    auto attacked = container;
    if (splicing) {
      true_mask = generate_mask(cfg.eval.mask, size, size, rng);
      const int64_t j = n > 1 ? (i + 1 + int64_t(rng.next_below(uint64_t(n - 1)))) % n
                              : 0;
      attacked = splice(container, val.images[j], true_mask);
    }
    if (!preset.menu.empty()) {
      attacked = random_degradation(attacked, preset, rng, false).first;
    }

    auto ro = pipeline->recover(attacked, cfg.eval.soft_mask);

    MetricRow row;
    row.name = i < int64_t(val.names.size()) ? val.names[size_t(i)]
                                             : std::to_string(i);
    row.psnr_db = psnr(ro.recovered, org);
    row.masked_psnr_db = psnr(ro.recovered, org, true_mask);
    row.ssim_val = ssim(ro.recovered, org);
    row.iou_val = iou(ro.mask, true_mask);
    row.f1_val = f1(ro.mask, true_mask);
    row.auc_val = auc(ro.soft_mask, true_mask);
    out.report.rows.push_back(row);

    sum_container += psnr(container, org).value_or(0.0);
    sum_attacked += psnr(attacked, org).value_or(0.0);
    sum_recovered += row.psnr_db.value_or(0.0);
    count += 1;

    if (emit) {
      const auto& name = row.name;
      if (emit->image) {
        emit->image(name + "_container", container);
        emit->image(name + "_attacked", attacked);
        emit->image(name + "_recovered", ro.recovered);
      }
      if (emit->mask) {
        emit->mask(name + "_mask_pred", ro.mask);
        emit->mask(name + "_mask_true", true_mask);
      }
    }
  }

  auto mean = out.report.means();
  out.mean_masked_psnr = mean.masked_psnr_db;
  out.mean_iou = mean.iou_val;
  out.mean_f1 = mean.f1_val;
  out.mean_auc = mean.auc_val;
  if (count > 0) {
    out.mean_container_psnr = sum_container / double(count);
    out.mean_attacked_psnr = sum_attacked / double(count);
    out.mean_recovered_psnr = sum_recovered / double(count);
  }
  return out;
}

}  // namespace selfrec
