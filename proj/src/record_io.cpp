#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rtfnet/dataset.hpp"
#include "rtfnet/dataset_json.hpp"
#include "rtfnet/errors.hpp"

namespace rtfnet {

namespace fs = std::filesystem;

namespace {

constexpr char kRecordMagic[4] = {'M', 'D', 'F', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}
std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return v;
}
float get_f32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::bit_cast<float>(get_u32(b, at));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

const char* damping_name(DampingModel damping) {
  return damping == DampingModel::kWavenumber ? "wavenumber" : "literal";
}

DampingModel parse_damping(const std::string& name) {
  if (name == "wavenumber") return DampingModel::kWavenumber;
  if (name == "literal") return DampingModel::kLiteral;
  throw ArgumentError("unknown damping model '" + name + "' (expected wavenumber|literal)");
}

nlohmann::json to_json(const GenConfig& c) {
  return {{"n_rooms", c.n_rooms},   {"split", c.split},
          {"t60_choices", c.t60_choices}, {"mic_choices", c.mic_choices},
          {"k", c.k},               {"f_lo", c.f_lo},
          {"f_hi", c.f_hi},         {"f_cutoff", c.f_cutoff},
          {"grid_w", c.grid_w},     {"grid_h", c.grid_h},
          {"speed_of_sound", c.speed_of_sound}, {"damping", damping_name(c.damping)},
          {"seed", c.seed}};
}

GenConfig gen_config_from_json(const nlohmann::json& j) {
  try {
    GenConfig c;
    c.n_rooms = j.at("n_rooms").get<std::size_t>();
    c.split = j.at("split").get<double>();
    c.t60_choices = j.at("t60_choices").get<std::vector<double>>();
    c.mic_choices = j.at("mic_choices").get<std::vector<std::size_t>>();
    c.k = j.at("k").get<std::size_t>();
    c.f_lo = j.at("f_lo").get<double>();
    c.f_hi = j.at("f_hi").get<double>();
    c.f_cutoff = j.at("f_cutoff").get<double>();
    c.grid_w = j.at("grid_w").get<std::size_t>();
    c.grid_h = j.at("grid_h").get<std::size_t>();
    c.speed_of_sound = j.at("speed_of_sound").get<double>();
    c.damping = parse_damping(j.at("damping").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("meta.json: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_record(const SampleRecord& r) {
  const FieldGrid& f = r.field;
  if (f.width != r.mask.width || f.height != r.mask.height) {
    throw ArgumentError("encode_record: mask and field grids differ");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kRecordHeaderBytes + f.data.size() * 8 + r.mask.mask.size());
  out.insert(out.end(), kRecordMagic, kRecordMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(f.width));
  put_u32(out, static_cast<std::uint32_t>(f.height));
  put_u32(out, static_cast<std::uint32_t>(f.num_freqs()));
  put_u64(out, r.seed);
  for (double v : {r.room.lx, r.room.ly, r.room.lz, r.room.t60, r.room.source[0], r.room.source[1],
                   r.room.source[2], r.room.z_plane}) {
    put_f32(out, v);
  }
  out.resize(kRecordHeaderBytes, 0);
  for (const auto& v : f.data) {
    put_f32(out, v.real());
    put_f32(out, v.imag());
  }
  out.insert(out.end(), r.mask.mask.begin(), r.mask.mask.end());
  return out;
}

SampleRecord decode_record(std::span<const std::uint8_t> b, const std::vector<double>& freqs,
                           bool allow_missing_t60) {
  if (b.size() < kRecordHeaderBytes) {
    throw DataError("record: " + std::to_string(b.size()) + " bytes is shorter than the header");
  }
  if (std::memcmp(b.data(), kRecordMagic, 4) != 0) throw DataError("record: bad magic");
  const std::size_t w = get_u32(b, 4), h = get_u32(b, 8), k = get_u32(b, 12);
  const std::size_t expected = kRecordHeaderBytes + w * h * k * 8 + w * h;
  if (b.size() != expected) {
    throw DataError("record: length mismatch, header W=" + std::to_string(w) + " H=" +
                    std::to_string(h) + " K=" + std::to_string(k) + " needs " +
                    std::to_string(expected) + " bytes, file has " + std::to_string(b.size()));
  }
  if (k != freqs.size()) {
    throw DataError("record: K=" + std::to_string(k) + " but " + std::to_string(freqs.size()) +
                    " frequencies are configured");
  }
  SampleRecord r;
  r.seed = get_u64(b, 16);
  float hdr[8];
  for (int i = 0; i < 8; ++i) hdr[i] = get_f32(b, 24 + 4 * i);
  for (int i = 0; i < 8; ++i) {
    if (i == 3 && allow_missing_t60 && std::isnan(hdr[i])) continue;
    if (!std::isfinite(hdr[i])) throw DataError("record: non-finite header field " + std::to_string(i));
  }
  r.room.lx = hdr[0];
  r.room.ly = hdr[1];
  r.room.lz = hdr[2];
  r.room.t60 = hdr[3];
  r.room.source = {hdr[4], hdr[5], hdr[6]};
  r.room.z_plane = hdr[7];
  r.room.grid_w = w;
  r.room.grid_h = h;

  r.field = FieldGrid(w, h, freqs);
  std::size_t at = kRecordHeaderBytes;
  for (std::size_t i = 0; i < r.field.data.size(); ++i, at += 8) {
    const float re = get_f32(b, at), im = get_f32(b, at + 4);
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw DataError("record: non-finite value at (w=" + std::to_string(i / (h * k)) + ", h=" +
                      std::to_string((i / k) % h) + ", k=" + std::to_string(i % k) + ")");
    }
    r.field.data[i] = {re, im};
  }
  r.mask = MicMask::from_bits(w, h, std::vector<std::uint8_t>(b.begin() + at, b.end()));
  return r;
}

void write_record(const fs::path& path, const SampleRecord& record) {
  write_file(path, encode_record(record));
}

SampleRecord read_record(const fs::path& path, const std::vector<double>& freqs) {
  try {
    return decode_record(read_file(path), freqs);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_dataset(const fs::path& dir, const Dataset& ds, bool force) {
  std::error_code ec;
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw ArgumentError("output directory " + dir.string() + " is not empty (use --force)");
  }
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json meta;
  meta["format_version"] = kDatasetFormatVersion;
  meta["config"] = to_json(ds.config);
  meta["freqs"] = ds.freqs;
  std::vector<std::string> train, validation;
  std::size_t index = 0;
  for (const auto* split : {&ds.train, &ds.validation}) {
    for (const auto& r : *split) {
      const std::string name = record_file_name(index++);
      write_record(dir / name, r);
      (split == &ds.train ? train : validation).push_back(name);
    }
  }
  meta["train"] = train;
  meta["validation"] = validation;
  const std::string text = meta.dump(2) + "\n";
  write_file(dir / "meta.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Dataset load_dataset(const fs::path& dir) {
  const auto bytes = read_file(dir / "meta.json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw DataError((dir / "meta.json").string() + ": " + e.what());
  }
  if (meta.value("format_version", 0u) != kDatasetFormatVersion) {
    throw DataError((dir / "meta.json").string() + ": unsupported format version");
  }
  Dataset ds;
  ds.config = gen_config_from_json(meta.at("config"));
  ds.freqs = meta.at("freqs").get<std::vector<double>>();
  auto load_split = [&](const char* key, std::vector<SampleRecord>& out) {
    for (const auto& name : meta.at(key)) {
      SampleRecord r = read_record(dir / name.get<std::string>(), ds.freqs);
      r.room.speed_of_sound = ds.config.speed_of_sound;
      r.field.room_id = name.get<std::string>();
      out.push_back(std::move(r));
    }
  };
  load_split("train", ds.train);
  load_split("validation", ds.validation);
  return ds;
}

SampleRecord import_measured_grid(const fs::path& path, const MeasuredGridLayout& layout) {
  SampleRecord r;
  try {
    r = decode_record(read_file(path), layout.freqs, /*allow_missing_t60=*/true);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (r.field.width != layout.width || r.field.height != layout.height) {
    throw DataError(path.string() + ": grid " + std::to_string(r.field.width) + "x" +
                    std::to_string(r.field.height) + " does not match the expected " +
                    std::to_string(layout.width) + "x" + std::to_string(layout.height));
  }
  if (layout.mics) {
    Rng rng(layout.mask_seed);
    r.mask = sample_mask(rng, *layout.mics, layout.width, layout.height);
    r.seed = layout.mask_seed;
  }
  r.field.room_id = path.filename().string();
  return r;
}

}  // namespace rtfnet
