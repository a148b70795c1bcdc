#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "selfrec/degrade.hpp"
#include "selfrec/losses.hpp"
#include "selfrec/masks.hpp"
#include "selfrec/shuffle.hpp"
#include "selfrec/watermark.hpp"

namespace selfrec {

struct DataConfig {
  std::string train_dir = "data/train";
  std::string val_dir = "data/val";
  int64_t image_size = 64;
  bool resize = false;
};

struct ModelConfig {
  int iw_blocks = 12;
  int hidden_width = 32;
  int wg_blocks = 3;
  int wg_patch = 4;
  int wg_embed_dim = 192;
  int wg_heads = 6;
  int ie_depth = 8;
  int ie_width = 32;
  int tl_base_width = 16;
  bool use_shuffle = true;
  bool use_wg = true;
  bool use_ie = true;
  NoiseMode noise_mode = NoiseMode::kLearned;
  uint64_t shuffle_seed = 0;
  int shuffle_patch = 1;
};

struct TrainConfig {
  int64_t iterations = 2000;
  int64_t batch_size = 2;
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.5;
  uint64_t seed = 1234;
  int64_t checkpoint_every = 500;
  std::string degradation_preset = "none";
  bool noise_supervision = false;
  double lambda_noise = 1.0;
  double clip_norm = 0.0;  // global gradient-norm cap, 0 disables
  LossWeights weights;
  MaskSpec mask;
};

struct EvalConfig {
  std::string attack = "splice";       // splice | none
  std::string degradation = "none";    // preset name
  bool soft_mask = false;
  uint64_t seed = 99;
  MaskSpec mask;
};

struct RunConfig {
  DataConfig data;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
};

// Strict parse: unknown keys anywhere raise ConfigError naming the key;
// missing keys keep their defaults. Values are range-checked.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Fully resolved round-trip of a config (every field present).
nlohmann::json config_to_json(const RunConfig& c);
void write_config_echo(const RunConfig& c, const std::string& path);

nlohmann::json mask_spec_to_json(const MaskSpec& m);
MaskSpec mask_spec_from_json(const nlohmann::json& j);

}  // namespace selfrec
