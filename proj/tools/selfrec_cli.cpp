#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "selfrec/evaluate.hpp"
#include "selfrec/image_io.hpp"
#include "selfrec/spectrum.hpp"
#include "selfrec/trainer.hpp"

namespace fs = std::filesystem;
using namespace selfrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMissingData = 2;
constexpr int kExitUnwritableOut = 3;
constexpr int kExitBadConfig = 4;
constexpr int kExitSizeMismatch = 5;
constexpr int kExitMissingInputs = 6;

struct CliError : std::runtime_error {
  int code;
  CliError(int code_, const std::string& msg)
      : std::runtime_error(msg), code(code_) {}
};

void require_data_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw CliError(kExitMissingData, "data directory not found: " + dir);
  }
}

void prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const auto probe = fs::path(dir) / ".write_probe";
  std::ofstream test(probe);
  if (ec || !test) {
    throw CliError(kExitUnwritableOut, "output directory not writable: " + dir);
  }
  test.close();
  fs::remove(probe, ec);
}

ImageSet load_inputs(const std::string& dir, int64_t size, bool resize) {
  require_data_dir(dir);
  ImageSet set;
  try {
    set = load_image_set(dir, size, resize);
  } catch (const ShapeError& e) {
    throw CliError(kExitSizeMismatch, e.what());
  }
  if (set.size() == 0) {
    throw CliError(kExitMissingInputs, "no images found in " + dir);
  }
  return set;
}

LoadedCheckpoint load_model(const std::string& path) {
  if (!fs::is_regular_file(path)) {
    throw CliError(kExitMissingData, "checkpoint not found: " + path);
  }
  return load_checkpoint(path);
}

int run_train(const std::string& config_path, std::optional<uint64_t> seed,
              const std::string& out_dir, int workers) {
  auto cfg = load_config(config_path);
  if (seed) cfg.train.seed = *seed;
  torch::set_num_threads(std::max(1, workers));

  require_data_dir(cfg.data.train_dir);
  prepare_out_dir(out_dir);
  write_config_echo(cfg, (fs::path(out_dir) / "config_echo.json").string());

  ImageSet train_set;
  try {
    train_set = load_image_set(cfg.data.train_dir, cfg.data.image_size,
                               cfg.data.resize);
  } catch (const ShapeError& e) {
    throw CliError(kExitSizeMismatch, e.what());
  }
  if (train_set.size() == 0) {
    throw CliError(kExitMissingInputs,
                   "no training images in " + cfg.data.train_dir);
  }

  Trainer trainer(cfg, std::move(train_set));
  std::ofstream log(fs::path(out_dir) / "train_log.txt");
  if (!log) {
    throw CliError(kExitUnwritableOut, "cannot write training log");
  }
  const auto ckpt_path = (fs::path(out_dir) / "model.ckpt").string();
  for (int64_t i = 0; i < cfg.train.iterations; ++i) {
    StepRecord rec;
    try {
      rec = trainer.step();
    } catch (const NumericError& e) {
      const auto halt = (fs::path(out_dir) / "model_prehalt.ckpt").string();
      trainer.save_snapshot(halt);
      std::cerr << "training halted: " << e.what()
                << " (pre-step state written to " << halt << ")\n";
      return 1;
    }
    log << format_record(rec) << "\n";
    if (trainer.iteration() % cfg.train.checkpoint_every == 0 ||
        trainer.iteration() == cfg.train.iterations) {
      trainer.save(ckpt_path);
    }
    if (trainer.iteration() % 100 == 0) {
      std::cerr << "step " << trainer.iteration() << "/" << cfg.train.iterations
                << " total=" << rec.total << "\n";
    }
  }
  trainer.save(ckpt_path);
  std::cout << "trained " << cfg.train.iterations << " steps, model at "
            << ckpt_path << "\n";
  return kExitOk;
}

int run_embed(const std::string& ckpt_path, const std::string& in_dir,
              const std::string& out_dir, bool resize) {
  auto loaded = load_model(ckpt_path);
  prepare_out_dir(out_dir);
  loaded.config.data.resize = resize || loaded.config.data.resize;
  write_config_echo(loaded.config,
                    (fs::path(out_dir) / "config_echo.json").string());
  auto set = load_inputs(in_dir, loaded.pipeline->image_size_,
                         loaded.config.data.resize);

  torch::NoGradGuard ng;
  loaded.pipeline->eval();
  for (int64_t i = 0; i < set.size(); ++i) {
    auto org = set.images[i];
    auto eo = loaded.pipeline->embed(org);
    auto container = torch::clamp(eo.container, 0.0, 1.0);
    const auto& name = set.names[size_t(i)];
    save_image(container, (fs::path(out_dir) / (name + "_container.png")).string());
    auto quality = psnr(container, org);
    std::cout << name << " container_psnr="
              << (quality ? std::to_string(*quality) : "missing") << "\n";
  }
  return kExitOk;
}

int run_recover(const std::string& ckpt_path, const std::string& in_dir,
                const std::string& out_dir, bool emit_intermediates,
                bool resize, bool soft_mask) {
  auto loaded = load_model(ckpt_path);
  prepare_out_dir(out_dir);
  loaded.config.data.resize = resize || loaded.config.data.resize;
  loaded.config.eval.soft_mask = soft_mask || loaded.config.eval.soft_mask;
  write_config_echo(loaded.config,
                    (fs::path(out_dir) / "config_echo.json").string());
  auto set = load_inputs(in_dir, loaded.pipeline->image_size_,
                         loaded.config.data.resize);

  torch::NoGradGuard ng;
  loaded.pipeline->eval();
  for (int64_t i = 0; i < set.size(); ++i) {
    auto attacked = set.images[i];
    auto ro = loaded.pipeline->recover(attacked, loaded.config.eval.soft_mask);
    const auto& name = set.names[size_t(i)];
    auto at = [&](const std::string& suffix) {
      return (fs::path(out_dir) / (name + suffix)).string();
    };
    save_image(ro.recovered, at("_recovered.png"));
    save_mask(ro.mask, at("_mask.png"));
    if (emit_intermediates) {
      save_image(torch::clamp(ro.secret_shuffled_est, 0.0, 1.0),
                 at("_secret_shuffled.png"));
      save_image(torch::clamp(ro.secret_est, 0.0, 1.0), at("_secret.png"));
      save_image(torch::clamp(ro.coarse, 0.0, 1.0), at("_coarse.png"));
      save_image(torch::clamp(ro.enhanced, 0.0, 1.0), at("_enhanced.png"));
    }
    std::cout << name << " recovered\n";
  }
  return kExitOk;
}

int run_evaluate(const std::string& ckpt_path, const std::string& in_dir,
                 const std::string& out_dir, std::optional<uint64_t> seed,
                 bool emit_intermediates, bool resize) {
  auto loaded = load_model(ckpt_path);
  prepare_out_dir(out_dir);
  if (seed) loaded.config.eval.seed = *seed;
  loaded.config.data.resize = resize || loaded.config.data.resize;
  write_config_echo(loaded.config,
                    (fs::path(out_dir) / "config_echo.json").string());
  auto set = load_inputs(in_dir, loaded.pipeline->image_size_,
                         loaded.config.data.resize);

  EvalEmit emit;
  if (emit_intermediates) {
    emit.image = [&](const std::string& name, const torch::Tensor& img) {
      save_image(img, (fs::path(out_dir) / (name + ".png")).string());
    };
    emit.mask = [&](const std::string& name, const torch::Tensor& mask) {
      save_mask(mask, (fs::path(out_dir) / (name + ".png")).string());
    };
  }
  auto summary = evaluate_pipeline(loaded.pipeline, loaded.config, set,
                                   emit_intermediates ? &emit : nullptr);
  summary.report.write_csv((fs::path(out_dir) / "report.csv").string());
  std::ofstream table(fs::path(out_dir) / "report.txt");
  table << summary.report.to_table();
  std::cout << summary.report.to_table();
  auto show = [](const char* label, const std::optional<double>& v) {
    std::cout << label << "="
              << (v ? std::to_string(*v) : std::string("missing")) << "\n";
  };
  show("mean_container_psnr", summary.mean_container_psnr);
  show("mean_attacked_psnr", summary.mean_attacked_psnr);
  show("mean_recovered_psnr", summary.mean_recovered_psnr);
  show("mean_masked_psnr", summary.mean_masked_psnr);
  return kExitOk;
}

int run_spectrum(const std::string& in_dir, const std::string& out_dir,
                 std::vector<int> patches, uint64_t seed) {
  prepare_out_dir(out_dir);
  require_data_dir(in_dir);
  auto files = list_images(in_dir);
  if (files.empty()) {
    throw CliError(kExitMissingInputs, "no images found in " + in_dir);
  }
  if (patches.empty()) {
    patches = {16, 8, 4, 2, 1};
  }
  std::ofstream csv(fs::path(out_dir) / "ratios.csv");
  if (!csv) {
    throw CliError(kExitUnwritableOut, "cannot write ratio table");
  }
  csv << "image,patch,high_frequency_ratio\n";
  for (const auto& file : files) {
    auto img = load_image(file);
    const auto stem = fs::path(file).stem().string();
    for (int p : patches) {
      torch::Tensor shuffled;
      try {
        shuffled = shuffle(img, ShuffleKey{seed, p});
      } catch (const ShapeError& e) {
        throw CliError(kExitSizeMismatch, e.what());
      } catch (const ConfigError& e) {
        throw CliError(kExitBadConfig, e.what());
      }
      const double ratio = high_frequency_ratio(shuffled);
      csv << stem << ',' << p << ',' << ratio << "\n";
      auto spec = fft_log_spectrum_image(shuffled);
      save_image(spec.unsqueeze(0).expand({3, spec.size(0), spec.size(1)}),
                 (fs::path(out_dir) / (stem + "_p" + std::to_string(p) +
                                       "_spectrum.png")).string());
    }
  }
  std::cout << "spectra for " << files.size() << " images x " << patches.size()
            << " patch sizes written to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invertible watermarking for image self-recovery"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, in_dir, out_dir = "out";
  std::optional<uint64_t> seed;
  bool emit_intermediates = false, resize = false, soft_mask = false;
  int workers = 1;
  std::vector<int> patches;

  auto add_common = [&](CLI::App* sub, bool with_ckpt) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--workers", workers, "compute threads");
    if (with_ckpt) {
      sub->add_option("--checkpoint", checkpoint, "model checkpoint")
          ->required();
    }
  };

  auto* train = app.add_subcommand("train", "optimize a model per config");
  train->add_option("--config", config_path, "run configuration json")
      ->required();
  add_common(train, false);

  auto* embed = app.add_subcommand("embed", "embed originals into containers");
  embed->add_option("--in", in_dir, "directory of original images")->required();
  embed->add_flag("--resize", resize, "center-crop/resize mismatched inputs");
  add_common(embed, true);

  auto* recover =
      app.add_subcommand("recover", "recover originals from attacked images");
  recover->add_option("--in", in_dir, "directory of attacked images")
      ->required();
  recover->add_flag("--emit-intermediates", emit_intermediates,
                    "write extraction intermediates");
  recover->add_flag("--resize", resize, "center-crop/resize mismatched inputs");
  recover->add_flag("--soft-mask", soft_mask, "composite with the soft mask");
  add_common(recover, true);

  auto* evaluate =
      app.add_subcommand("evaluate", "attack, recover and score a corpus");
  evaluate->add_option("--in", in_dir, "directory of original images")
      ->required();
  evaluate->add_flag("--emit-intermediates", emit_intermediates,
                     "write per-image artifacts");
  evaluate->add_flag("--resize", resize, "center-crop/resize mismatched inputs");
  add_common(evaluate, true);

  auto* spectrum = app.add_subcommand(
      "analyze-spectrum", "spectra and high-frequency ratios under shuffling");
  spectrum->add_option("--in", in_dir, "directory of images")->required();
  spectrum->add_option("--patches", patches, "patch sizes (default 16 8 4 2 1)");
  add_common(spectrum, false);

  CLI11_PARSE(app, argc, argv);

  try {
    torch::set_num_threads(std::max(1, workers));
    if (train->parsed()) {
      return run_train(config_path, seed, out_dir, workers);
    }
    if (embed->parsed()) {
      return run_embed(checkpoint, in_dir, out_dir, resize);
    }
    if (recover->parsed()) {
      return run_recover(checkpoint, in_dir, out_dir, emit_intermediates,
                         resize, soft_mask);
    }
    if (evaluate->parsed()) {
      return run_evaluate(checkpoint, in_dir, out_dir, seed,
                          emit_intermediates, resize);
    }
    if (spectrum->parsed()) {
      return run_spectrum(in_dir, out_dir, patches, seed.value_or(0));
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSizeMismatch;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
