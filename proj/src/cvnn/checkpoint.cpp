#include "rtfnet/cvnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

namespace {

constexpr char kMagic[8] = {'R', 'T', 'F', 'C', 'K', 'P', 'T', '1'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    bytes.insert(bytes.end(), c, c + n);
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  void need(std::size_t n) const {
    if (at_ + n > b_.size()) throw DataError("checkpoint: truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[at_ + i]) << (8 * i);
    at_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[at_ + i]) << (8 * i);
    at_ += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + at_), n);
    at_ += n;
    return s;
  }
  bool done() const { return at_ == b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t at_ = 0;
};

}  // namespace

const StoredTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

template <typename T>
void Checkpoint::add(const std::string& name, const ComplexTensor<T>& tensor) {
  StoredTensor s;
  s.shape = tensor.shape();
  s.values.reserve(tensor.size());
  for (const auto& v : tensor.values()) {
    s.values.emplace_back(static_cast<float>(v.real()), static_cast<float>(v.imag()));
  }
  tensors.emplace_back(name, std::move(s));
}

template <typename T>
void Checkpoint::restore(const std::string& name, ComplexTensor<T>& dest) const {
  const StoredTensor* s = find(name);
  if (!s) throw DataError("checkpoint: missing tensor " + name);
  if (s->shape != dest.shape()) {
    throw DataError("checkpoint: tensor " + name + " has shape " + shape_string(s->shape) +
                    ", model expects " + shape_string(dest.shape()));
  }
  for (std::size_t i = 0; i < s->values.size(); ++i) {
    dest[i] = {static_cast<T>(s->values[i].real()), static_cast<T>(s->values[i].imag())};
  }
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  const std::string meta = ckpt.meta.dump();
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.raw(meta.data(), meta.size());
  w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.raw(name.data(), name.size());
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.u64(d);
    for (const auto& v : t.values) {
      w.f32(v.real());
      w.f32(v.imag());
    }
  }
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.str(8) != std::string(kMagic, 8)) throw DataError("checkpoint: bad magic");
  if (r.u32() != kCheckpointVersion) throw DataError("checkpoint: unsupported version");
  Checkpoint ckpt;
  try {
    ckpt.meta = nlohmann::json::parse(r.str(r.u32()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad metadata: ") + e.what());
  }
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str(r.u32());
    StoredTensor t;
    t.shape.resize(r.u32());
    for (auto& d : t.shape) d = r.u64();
    const std::size_t count = shape_size(t.shape);
    r.need(count * 8);
    t.values.resize(count);
    for (auto& v : t.values) {
      const float re = r.f32();
      const float im = r.f32();
      v = {re, im};
    }
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes");
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = encode_checkpoint(ckpt);
  // Write-then-rename so an interrupted run never leaves a torn checkpoint.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return decode_checkpoint(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const UNetSpec& spec) {
  auto layers = [](const std::vector<LayerSpec>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : list) {
      nlohmann::json j = {{"filters", l.filters},
                          {"kernel", l.kernel},
                          {"stride", l.stride},
                          {"upsample_before", l.upsample_before},
                          {"activation_and_norm", l.activation_and_norm}};
      j["skip_from"] = l.skip_from ? nlohmann::json(*l.skip_from) : nlohmann::json(nullptr);
      arr.push_back(j);
    }
    return arr;
  };
  return {{"in_channels", spec.in_channels},
          {"out_channels", spec.out_channels},
          {"encoder", layers(spec.encoder)},
          {"decoder", layers(spec.decoder)}};
}

UNetSpec unet_spec_from_json(const nlohmann::json& j) {
  try {
    auto layers = [](const nlohmann::json& arr) {
      std::vector<LayerSpec> out;
      for (const auto& e : arr) {
        LayerSpec l;
        l.filters = e.at("filters").get<std::size_t>();
        l.kernel = e.at("kernel").get<std::size_t>();
        l.stride = e.at("stride").get<std::size_t>();
        l.upsample_before = e.at("upsample_before").get<bool>();
        l.activation_and_norm = e.at("activation_and_norm").get<bool>();
        if (!e.at("skip_from").is_null()) l.skip_from = e.at("skip_from").get<std::size_t>();
        out.push_back(l);
      }
      return out;
    };
    UNetSpec s;
    s.in_channels = j.at("in_channels").get<std::size_t>();
    s.out_channels = j.at("out_channels").get<std::size_t>();
    s.encoder = layers(j.at("encoder"));
    s.decoder = layers(j.at("decoder"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad network spec: ") + e.what());
  }
}

template <typename T>
void add_model(Checkpoint& ckpt, UNet<T>& model, const std::string& prefix) {
  ckpt.meta["unet"] = to_json(model.spec());
  for (auto& p : model.parameters()) ckpt.add(prefix + "param/" + p.name, *p.tensor);
  for (auto& b : model.buffers()) ckpt.add(prefix + "buffer/" + b.name, *b.tensor);
}

template <typename T>
void restore_model(const Checkpoint& ckpt, UNet<T>& model, const std::string& prefix) {
  for (auto& p : model.parameters()) ckpt.restore(prefix + "param/" + p.name, *p.tensor);
  for (auto& b : model.buffers()) ckpt.restore(prefix + "buffer/" + b.name, *b.tensor);
}

template <typename T>
std::unique_ptr<UNet<T>> load_model(const std::filesystem::path& path) {
  const Checkpoint ckpt = read_checkpoint(path);
  if (!ckpt.meta.contains("unet")) throw DataError(path.string() + ": no network spec");
  auto model = std::make_unique<UNet<T>>(unet_spec_from_json(ckpt.meta.at("unet")));
  restore_model(ckpt, *model);
  return model;
}

#define RTFNET_INSTANTIATE(T)                                                             \
  template void Checkpoint::add(const std::string&, const ComplexTensor<T>&);             \
  template void Checkpoint::restore(const std::string&, ComplexTensor<T>&) const;         \
  template void add_model(Checkpoint&, UNet<T>&, const std::string&);                     \
  template void restore_model(const Checkpoint&, UNet<T>&, const std::string&);           \
  template std::unique_ptr<UNet<T>> load_model(const std::filesystem::path&);

RTFNET_INSTANTIATE(float)
RTFNET_INSTANTIATE(double)
#undef RTFNET_INSTANTIATE

}  // namespace rtfnet::cvnn
