// Python surface of the core: thin numpy adapters around the tensor API.
// Images cross the boundary channels-last ((H,W,C) float32 in [0,1]); masks
// and spectra as (H,W). Multi-band stacks keep the same convention, e.g. a
// subband tensor comes back as (H/2,W/2,4C).
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "selfrec/config.hpp"
#include "selfrec/degrade.hpp"
#include "selfrec/evaluate.hpp"
#include "selfrec/generator.hpp"
#include "selfrec/localize.hpp"
#include "selfrec/masks.hpp"
#include "selfrec/metrics.hpp"
#include "selfrec/shuffle.hpp"
#include "selfrec/spectrum.hpp"
#include "selfrec/wavelet.hpp"

namespace py = pybind11;
using namespace selfrec;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

torch::Tensor to_tensor(const FloatArray& a) {
  auto buf = a.request();
  if (buf.ndim == 2) {
    return torch::from_blob(buf.ptr,
                            {int64_t(buf.shape[0]), int64_t(buf.shape[1])},
                            torch::kFloat32)
        .clone();
  }
  if (buf.ndim == 3) {
    auto t = torch::from_blob(buf.ptr,
                              {int64_t(buf.shape[0]), int64_t(buf.shape[1]),
                               int64_t(buf.shape[2])},
                              torch::kFloat32)
                 .clone();
    return t.permute({2, 0, 1}).contiguous();
  }
  throw ShapeError("expected a (H,W) or (H,W,C) float array, got ndim=" +
                   std::to_string(buf.ndim));
}

py::array_t<float> to_array(torch::Tensor t) {
  t = t.detach().to(torch::kFloat32);
  if (t.dim() == 3) {
    t = t.permute({1, 2, 0});
  }
  t = t.contiguous();
  std::vector<py::ssize_t> shape(t.sizes().begin(), t.sizes().end());
  py::array_t<float> out(shape);
  std::memcpy(out.mutable_data(), t.data_ptr<float>(),
              sizeof(float) * size_t(t.numel()));
  return out;
}

// The pipeline is exposed for inference only; training stays in the CLI.
struct PyPipeline {
  Pipeline pipe{nullptr};
  RunConfig cfg;

  static PyPipeline from_config(const std::string& path) {
    PyPipeline p;
    p.cfg = load_config(path);
    torch::manual_seed(int64_t(p.cfg.train.seed));
    p.pipe = Pipeline(p.cfg.model, p.cfg.data.image_size);
    p.pipe->eval();
    return p;
  }

  static PyPipeline from_checkpoint(const std::string& path) {
    auto loaded = load_checkpoint(path);
    PyPipeline p;
    p.cfg = loaded.config;
    p.pipe = loaded.pipeline;
    p.pipe->eval();
    return p;
  }

  py::dict embed(const FloatArray& img) {
    torch::NoGradGuard ng;
    auto out = pipe->embed(to_tensor(img).unsqueeze(0));
    py::dict d;
    d["secret"] = to_array(out.secret.squeeze(0));
    d["secret_shuffled"] = to_array(out.secret_shuffled.squeeze(0));
    d["container"] = to_array(out.container.squeeze(0));
    d["residual"] = to_array(out.residual.squeeze(0));
    return d;
  }

  py::dict recover(const FloatArray& img, bool soft) {
    torch::NoGradGuard ng;
    auto out = pipe->recover(to_tensor(img), soft);
    py::dict d;
    d["cover_est"] = to_array(out.cover_est);
    d["secret_est"] = to_array(out.secret_est);
    d["coarse"] = to_array(out.coarse);
    d["enhanced"] = to_array(out.enhanced);
    d["soft_mask"] = to_array(out.soft_mask);
    d["mask"] = to_array(out.mask);
    d["recovered"] = to_array(out.recovered);
    return d;
  }

  int64_t image_size() const { return pipe->image_size_; }
};

}  // namespace

PYBIND11_MODULE(_selfrec_cpp, m) {
  m.doc() = "neural self-recovery watermarking core";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  m.def(
      "haar_forward",
      [](const FloatArray& img) { return to_array(dwt_haar(to_tensor(img))); },
      py::arg("img"),
      "Single-level orthonormal Haar transform, (H,W,C) -> (H/2,W/2,4C).");
  m.def(
      "haar_inverse",
      [](const FloatArray& sub) { return to_array(iwt_haar(to_tensor(sub))); },
      py::arg("sub"), "Inverse of haar_forward.");

  m.def(
      "shuffle",
      [](const FloatArray& img, uint64_t seed, int patch) {
        return to_array(shuffle(to_tensor(img), ShuffleKey{seed, patch}));
      },
      py::arg("img"), py::arg("seed") = 0, py::arg("patch") = 1,
      "Keyed patch permutation.");
  m.def(
      "unshuffle",
      [](const FloatArray& img, uint64_t seed, int patch) {
        return to_array(unshuffle(to_tensor(img), ShuffleKey{seed, patch}));
      },
      py::arg("img"), py::arg("seed") = 0, py::arg("patch") = 1,
      "Exact inverse of shuffle for the same key.");
  m.def(
      "permutation",
      [](uint64_t seed, int patch, int64_t h, int64_t w) {
        return build_permutation(ShuffleKey{seed, patch}, h, w);
      },
      py::arg("seed"), py::arg("patch"), py::arg("h"), py::arg("w"),
      "The raw patch permutation a key produces on an h x w image.");

  m.def(
      "high_frequency_ratio",
      [](const FloatArray& img, double cutoff) {
        return high_frequency_ratio(to_tensor(img), cutoff);
      },
      py::arg("img"), py::arg("cutoff") = 0.5);
  m.def(
      "spectrum_image",
      [](const FloatArray& img) {
        return to_array(fft_log_spectrum_image(to_tensor(img)));
      },
      py::arg("img"), "log1p magnitude spectrum rescaled to [0,1], (H,W).");

  m.def(
      "tv_loss",
      [](const FloatArray& img, bool mean) {
        auto t = to_tensor(img).unsqueeze(0);
        return tv_loss(t, mean ? TvReduction::kMean : TvReduction::kSum)
            .item<double>();
      },
      py::arg("img"), py::arg("mean") = false);

  m.def(
      "psnr",
      [](const FloatArray& a, const FloatArray& b,
         const std::optional<FloatArray>& mask) {
        std::optional<torch::Tensor> m2;
        if (mask) {
          m2 = to_tensor(*mask);
        }
        return psnr(to_tensor(a), to_tensor(b), m2);
      },
      py::arg("a"), py::arg("b"), py::arg("mask") = py::none());
  m.def(
      "ssim",
      [](const FloatArray& a, const FloatArray& b) {
        return ssim(to_tensor(a), to_tensor(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "iou",
      [](const FloatArray& pred, const FloatArray& truth) {
        return iou(to_tensor(pred), to_tensor(truth));
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "f1",
      [](const FloatArray& pred, const FloatArray& truth) {
        return f1(to_tensor(pred), to_tensor(truth));
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "auc",
      [](const FloatArray& scores, const FloatArray& truth) {
        return auc(to_tensor(scores), to_tensor(truth));
      },
      py::arg("scores"), py::arg("truth"));

  m.def(
      "generate_mask",
      [](int64_t h, int64_t w, uint64_t seed, double min_width,
         double max_width, double min_coverage, double max_coverage,
         int max_turns) {
        MaskSpec spec;
        spec.min_width = min_width;
        spec.max_width = max_width;
        spec.min_coverage = min_coverage;
        spec.max_coverage = max_coverage;
        spec.max_turns = max_turns;
        SplitMix64 rng(seed);
        return to_array(generate_mask(spec, h, w, rng));
      },
      py::arg("h"), py::arg("w"), py::arg("seed") = 0,
      py::arg("min_width") = 20.0, py::arg("max_width") = 50.0,
      py::arg("min_coverage") = 0.1, py::arg("max_coverage") = 0.5,
      py::arg("max_turns") = 4,
      "Random irregular tamper mask, (H,W) with 1 = tampered.");
  m.def(
      "splice",
      [](const FloatArray& img, const FloatArray& donor, const FloatArray& mask) {
        return to_array(splice(to_tensor(img), to_tensor(donor), to_tensor(mask)));
      },
      py::arg("img"), py::arg("donor"), py::arg("mask"));
  m.def(
      "composite",
      [](const FloatArray& fg, const FloatArray& bg, const FloatArray& mask) {
        return to_array(composite(to_tensor(fg), to_tensor(bg), to_tensor(mask)));
      },
      py::arg("fg"), py::arg("bg"), py::arg("mask"));
  m.def(
      "binarize_mask",
      [](const FloatArray& soft, double thr) {
        return to_array(binarize_mask(to_tensor(soft), thr));
      },
      py::arg("soft"), py::arg("thr") = 0.5);

  m.def(
      "bce",
      [](const FloatArray& soft, const FloatArray& truth) {
        return bce_loss(to_tensor(soft), to_tensor(truth)).item<double>();
      },
      py::arg("soft"), py::arg("truth"),
      "Mean binary cross entropy between a soft and a binary mask.");

  m.def(
      "jpeg",
      [](const FloatArray& img, int quality, bool train_mode) {
        return to_array(jpeg_degrade(to_tensor(img), quality, train_mode));
      },
      py::arg("img"), py::arg("quality") = 90, py::arg("train_mode") = false,
      "Differentiable JPEG surrogate (hard rounding unless train_mode).");
  m.def(
      "degrade",
      [](const FloatArray& img, const std::string& preset, uint64_t seed,
         bool train_mode) {
        SplitMix64 rng(seed);
        auto [out, spec] =
            random_degradation(to_tensor(img), preset_by_name(preset), rng,
                               train_mode);
        return py::make_tuple(to_array(out), to_string(spec.kind));
      },
      py::arg("img"), py::arg("preset") = "eval", py::arg("seed") = 0,
      py::arg("train_mode") = false,
      "Random draw from a degradation preset; returns (image, kind).");

  py::class_<PyPipeline>(m, "Pipeline",
                         "Embed/recover interface over a trained model.")
      .def_static("from_config", &PyPipeline::from_config, py::arg("path"),
                  "Fresh model from a JSON run config (seeded init).")
      .def_static("from_checkpoint", &PyPipeline::from_checkpoint,
                  py::arg("path"))
      .def("embed", &PyPipeline::embed, py::arg("img"))
      .def("recover", &PyPipeline::recover, py::arg("img"),
           py::arg("soft") = false)
      .def_property_readonly("image_size", &PyPipeline::image_size);
}
