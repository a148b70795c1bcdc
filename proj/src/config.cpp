#include "selfrec/config.hpp"

#include <fstream>
#include <set>

namespace selfrec {

namespace {

using nlohmann::json;

// pulls known keys out of an object and rejects anything left over
struct Section {
  const json& j;
  std::string where;
  std::set<std::string> seen;

  Section(const json& j_, std::string where_) : j(j_), where(std::move(where_)) {
    if (!j.is_object()) {
      throw ConfigError(where + " must be an object");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen.insert(key);
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where + "." + key + " has the wrong type");
    }
  }

  bool has(const char* key) {
    seen.insert(key);
    return j.contains(key);
  }

  void finish() const {
    for (auto& [key, value] : j.items()) {
      if (!seen.count(key)) {
        throw ConfigError("unknown key " + where + "." + key);
      }
    }
  }
};

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::pair<double, double> pair_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(where + " must be a [lo, hi] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

MaskSpec mask_spec_from_json(const json& j) {
  MaskSpec m;
  Section s(j, "mask");
  std::string strategy = m.strategy == MaskStrategy::kBox ? "box" : "irregular";
  s.get("strategy", strategy);
  if (strategy == "box") {
    m.strategy = MaskStrategy::kBox;
  } else if (strategy == "irregular") {
    m.strategy = MaskStrategy::kIrregular;
  } else {
    throw ConfigError("mask.strategy must be irregular or box");
  }
  if (s.has("strokes")) {
    auto [lo, hi] = pair_of(j.at("strokes"), "mask.strokes");
    m.min_strokes = int(lo);
    m.max_strokes = int(hi);
  }
  if (s.has("stroke_width")) {
    std::tie(m.min_width, m.max_width) =
        pair_of(j.at("stroke_width"), "mask.stroke_width");
  }
  s.get("max_turns", m.max_turns);
  if (s.has("boxes")) {
    auto [lo, hi] = pair_of(j.at("boxes"), "mask.boxes");
    m.min_boxes = int(lo);
    m.max_boxes = int(hi);
  }
  if (s.has("box_edge")) {
    auto [lo, hi] = pair_of(j.at("box_edge"), "mask.box_edge");
    m.min_edge = int(lo);
    m.max_edge = int(hi);
  }
  s.get("box_margin", m.box_margin);
  if (s.has("coverage")) {
    std::tie(m.min_coverage, m.max_coverage) =
        pair_of(j.at("coverage"), "mask.coverage");
  }
  s.finish();
  check(m.min_strokes >= 1 && m.max_strokes >= m.min_strokes,
        "mask.strokes range is invalid");
  check(m.min_width > 0 && m.max_width >= m.min_width,
        "mask.stroke_width range is invalid");
  check(m.max_turns >= 0, "mask.max_turns must be >= 0");
  check(m.min_boxes >= 1 && m.max_boxes >= m.min_boxes,
        "mask.boxes range is invalid");
  check(m.min_edge > 0 && m.max_edge >= m.min_edge,
        "mask.box_edge range is invalid");
  check(m.min_coverage >= 0 && m.max_coverage <= 1 &&
            m.max_coverage >= m.min_coverage,
        "mask.coverage range is invalid");
  return m;
}

json mask_spec_to_json(const MaskSpec& m) {
  return json{
      {"strategy", m.strategy == MaskStrategy::kBox ? "box" : "irregular"},
      {"strokes", {m.min_strokes, m.max_strokes}},
      {"stroke_width", {m.min_width, m.max_width}},
      {"max_turns", m.max_turns},
      {"boxes", {m.min_boxes, m.max_boxes}},
      {"box_edge", {m.min_edge, m.max_edge}},
      {"box_margin", m.box_margin},
      {"coverage", {m.min_coverage, m.max_coverage}},
  };
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "config");

  if (root.has("data")) {
    Section s(j.at("data"), "data");
    s.get("train_dir", c.data.train_dir);
    s.get("val_dir", c.data.val_dir);
    s.get("image_size", c.data.image_size);
    s.get("resize", c.data.resize);
    s.finish();
    check(c.data.image_size >= 16 && c.data.image_size % 8 == 0,
          "data.image_size must be >= 16 and divisible by 8");
  }

  if (root.has("model")) {
    Section s(j.at("model"), "model");
    s.get("iw_blocks", c.model.iw_blocks);
    s.get("hidden_width", c.model.hidden_width);
    s.get("wg_blocks", c.model.wg_blocks);
    s.get("wg_patch", c.model.wg_patch);
    s.get("wg_embed_dim", c.model.wg_embed_dim);
    s.get("wg_heads", c.model.wg_heads);
    s.get("ie_depth", c.model.ie_depth);
    s.get("ie_width", c.model.ie_width);
    s.get("tl_base_width", c.model.tl_base_width);
    s.get("use_shuffle", c.model.use_shuffle);
    s.get("use_wg", c.model.use_wg);
    s.get("use_ie", c.model.use_ie);
    std::string noise = c.model.noise_mode == NoiseMode::kZero ? "zero" : "learned";
    s.get("noise_mode", noise);
    if (noise == "zero") {
      c.model.noise_mode = NoiseMode::kZero;
    } else if (noise == "learned") {
      c.model.noise_mode = NoiseMode::kLearned;
    } else {
      throw ConfigError("model.noise_mode must be zero or learned");
    }
    s.get("shuffle_seed", c.model.shuffle_seed);
    s.get("shuffle_patch", c.model.shuffle_patch);
    s.finish();
    check(c.model.iw_blocks >= 1, "model.iw_blocks must be >= 1");
    check(c.model.hidden_width >= 1, "model.hidden_width must be >= 1");
    check(c.model.wg_blocks >= 1, "model.wg_blocks must be >= 1");
    const int p = c.model.shuffle_patch;
    check(p == 1 || p == 2 || p == 4 || p == 8 || p == 16,
          "model.shuffle_patch must be one of 1,2,4,8,16");
  }

  if (root.has("train")) {
    Section s(j.at("train"), "train");
    s.get("iterations", c.train.iterations);
    s.get("batch_size", c.train.batch_size);
    s.get("lr", c.train.lr);
    s.get("beta1", c.train.beta1);
    s.get("beta2", c.train.beta2);
    s.get("seed", c.train.seed);
    s.get("checkpoint_every", c.train.checkpoint_every);
    s.get("degradation_preset", c.train.degradation_preset);
    s.get("noise_supervision", c.train.noise_supervision);
    s.get("lambda_noise", c.train.lambda_noise);
    s.get("clip_norm", c.train.clip_norm);
    if (s.has("loss_weights")) {
      Section lw(j.at("train").at("loss_weights"), "train.loss_weights");
      lw.get("perceptual", c.train.weights.perceptual);
      lw.get("w", c.train.weights.w);
      lw.get("e", c.train.weights.e);
      lw.get("tv", c.train.weights.tv);
      lw.get("wg", c.train.weights.wg);
      lw.get("ie", c.train.weights.ie);
      lw.get("tl", c.train.weights.tl);
      lw.finish();
    }
    if (s.has("mask")) {
      c.train.mask = mask_spec_from_json(j.at("train").at("mask"));
    }
    s.finish();
    check(c.train.iterations >= 1, "train.iterations must be >= 1");
    check(c.train.batch_size >= 1, "train.batch_size must be >= 1");
    check(c.train.lr > 0, "train.lr must be positive");
    check(c.train.beta1 >= 0 && c.train.beta1 < 1, "train.beta1 out of range");
    check(c.train.beta2 >= 0 && c.train.beta2 < 1, "train.beta2 out of range");
    check(c.train.checkpoint_every >= 1,
          "train.checkpoint_every must be >= 1");
    preset_by_name(c.train.degradation_preset);  // validates the name
  }

  if (root.has("eval")) {
    Section s(j.at("eval"), "eval");
    s.get("attack", c.eval.attack);
    s.get("degradation", c.eval.degradation);
    s.get("soft_mask", c.eval.soft_mask);
    s.get("seed", c.eval.seed);
    if (s.has("mask")) {
      c.eval.mask = mask_spec_from_json(j.at("eval").at("mask"));
    }
    s.finish();
    check(c.eval.attack == "splice" || c.eval.attack == "none",
          "eval.attack must be splice or none");
    preset_by_name(c.eval.degradation);
  }

  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid json: " + std::string(e.what()));
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& c) {
  return json{
      {"data",
       {{"train_dir", c.data.train_dir},
        {"val_dir", c.data.val_dir},
        {"image_size", c.data.image_size},
        {"resize", c.data.resize}}},
      {"model",
       {{"iw_blocks", c.model.iw_blocks},
        {"hidden_width", c.model.hidden_width},
        {"wg_blocks", c.model.wg_blocks},
        {"wg_patch", c.model.wg_patch},
        {"wg_embed_dim", c.model.wg_embed_dim},
        {"wg_heads", c.model.wg_heads},
        {"ie_depth", c.model.ie_depth},
        {"ie_width", c.model.ie_width},
        {"tl_base_width", c.model.tl_base_width},
        {"use_shuffle", c.model.use_shuffle},
        {"use_wg", c.model.use_wg},
        {"use_ie", c.model.use_ie},
        {"noise_mode",
         c.model.noise_mode == NoiseMode::kZero ? "zero" : "learned"},
        {"shuffle_seed", c.model.shuffle_seed},
        {"shuffle_patch", c.model.shuffle_patch}}},
      {"train",
       {{"iterations", c.train.iterations},
        {"batch_size", c.train.batch_size},
        {"lr", c.train.lr},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"seed", c.train.seed},
        {"checkpoint_every", c.train.checkpoint_every},
        {"degradation_preset", c.train.degradation_preset},
        {"noise_supervision", c.train.noise_supervision},
        {"lambda_noise", c.train.lambda_noise},
        {"loss_weights",
         {{"perceptual", c.train.weights.perceptual},
          {"w", c.train.weights.w},
          {"e", c.train.weights.e},
          {"tv", c.train.weights.tv},
          {"wg", c.train.weights.wg},
          {"ie", c.train.weights.ie},
          {"tl", c.train.weights.tl}}},
        {"mask", mask_spec_to_json(c.train.mask)}}},
      {"eval",
       {{"attack", c.eval.attack},
        {"degradation", c.eval.degradation},
        {"soft_mask", c.eval.soft_mask},
        {"seed", c.eval.seed},
        {"mask", mask_spec_to_json(c.eval.mask)}}},
  };
}

void write_config_echo(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write config echo: " + path);
  }
  out << config_to_json(c).dump(2) << "\n";
}

}  // namespace selfrec
