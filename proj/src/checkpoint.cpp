#include <cstring>
#include <fstream>

#include "selfrec/pipeline.hpp"

namespace selfrec {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'W', 'M'};

void put_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& os, uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
uint64_t get_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_tensor(std::ostream& os, const std::string& name,
                  const torch::Tensor& t) {
  put_u32(os, uint32_t(name.size()));
  os.write(name.data(), std::streamsize(name.size()));
  auto c = t.detach().to(torch::kFloat).contiguous();
  put_u32(os, uint32_t(c.dim()));
  for (int64_t d = 0; d < c.dim(); ++d) {
    put_u64(os, uint64_t(c.size(d)));
  }
  const uint64_t bytes = uint64_t(c.numel()) * sizeof(float);
  put_u64(os, bytes);
  os.write(reinterpret_cast<const char*>(c.data_ptr<float>()),
           std::streamsize(bytes));
}

}  // namespace

void save_checkpoint(const Pipeline& pipeline, const RunConfig& config,
                     int64_t iteration, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw IoError("cannot write checkpoint: " + path);
  }
  os.write(kMagic, 4);
  put_u32(os, kCheckpointVersion);

  nlohmann::json meta;
  meta["config"] = config_to_json(config);
  meta["iteration"] = iteration;
  meta["image_size"] = pipeline->image_size_;
  const std::string blob = meta.dump();
  put_u64(os, blob.size());
  os.write(blob.data(), std::streamsize(blob.size()));

  auto params = pipeline->named_parameters();
  auto buffers = pipeline->named_buffers();
  put_u64(os, uint64_t(params.size() + buffers.size()));
  for (const auto& p : params) {
    write_tensor(os, p.key(), p.value());
  }
  for (const auto& b : buffers) {
    write_tensor(os, "buffer/" + b.key(), b.value());
  }
  if (!os) {
    throw IoError("short write saving checkpoint: " + path);
  }
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open checkpoint: " + path);
  }
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("not a checkpoint file: " + path);
  }
  const uint32_t version = get_u32(is);
  if (version != kCheckpointVersion) {
    throw ConfigError("unsupported checkpoint version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const uint64_t blob_len = get_u64(is);
  std::string blob(blob_len, '\0');
  is.read(blob.data(), std::streamsize(blob_len));
  if (!is) {
    throw ConfigError("truncated checkpoint: " + path);
  }
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("corrupt checkpoint metadata: " + path);
  }

  LoadedCheckpoint out;
  out.config = parse_config(meta.at("config"));
  out.iteration = meta.at("iteration").get<int64_t>();
  const int64_t image_size = meta.at("image_size").get<int64_t>();
  out.pipeline = Pipeline(out.config.model, image_size);

  auto params = out.pipeline->named_parameters();
  auto buffers = out.pipeline->named_buffers();
  const uint64_t count = get_u64(is);
  const uint64_t expect = params.size() + buffers.size();
  if (count != expect) {
    throw ConfigError("checkpoint holds " + std::to_string(count) +
                      " tensors, model needs " + std::to_string(expect));
  }
  torch::NoGradGuard ng;
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const uint32_t ndim = get_u32(is);
    std::vector<int64_t> dims(ndim);
    for (auto& d : dims) {
      d = int64_t(get_u64(is));
    }
    const uint64_t bytes = get_u64(is);
    torch::Tensor* dst = nullptr;
    if (name.rfind("buffer/", 0) == 0) {
      dst = buffers.find(name.substr(7));
    } else {
      dst = params.find(name);
    }
    if (!dst) {
      throw ConfigError("checkpoint tensor has no home: " + name);
    }
    auto t = torch::empty(dims, torch::kFloat);
    if (bytes != uint64_t(t.numel()) * sizeof(float)) {
      throw ConfigError("checkpoint tensor size mismatch: " + name);
    }
    is.read(reinterpret_cast<char*>(t.data_ptr<float>()),
            std::streamsize(bytes));
    if (!is) {
      throw ConfigError("truncated checkpoint: " + path);
    }
    if (t.sizes() != dst->sizes()) {
      throw ConfigError("checkpoint tensor shape mismatch: " + name);
    }
    dst->copy_(t);
  }
  return out;
}

}  // namespace selfrec
