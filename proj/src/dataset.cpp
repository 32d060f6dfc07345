#include "rtfnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "rtfnet/errors.hpp"

namespace rtfnet {

MicMask MicMask::from_observed(std::size_t width, std::size_t height,
                               std::vector<std::pair<std::size_t, std::size_t>> observed) {
  MicMask m;
  m.width = width;
  m.height = height;
  m.mask.assign(width * height, 0);
  for (const auto& [w, h] : observed) {
    if (w >= width || h >= height) {
      throw ArgumentError("MicMask: index (" + std::to_string(w) + ", " + std::to_string(h) +
                          ") outside the grid");
    }
    if (m.mask[w * height + h]) {
      throw ArgumentError("MicMask: duplicate index (" + std::to_string(w) + ", " +
                          std::to_string(h) + ")");
    }
    m.mask[w * height + h] = 1;
  }
  m.observed = std::move(observed);
  return m;
}

MicMask MicMask::from_bits(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits) {
  if (bits.size() != width * height) throw DataError("MicMask: mask size does not match the grid");
  std::vector<std::pair<std::size_t, std::size_t>> observed;
  for (std::size_t w = 0; w < width; ++w) {
    for (std::size_t h = 0; h < height; ++h) {
      const auto b = bits[w * height + h];
      if (b > 1) throw DataError("MicMask: mask byte at (" + std::to_string(w) + ", " + std::to_string(h) + ") is not 0/1");
      if (b) observed.emplace_back(w, h);
    }
  }
  MicMask m;
  m.width = width;
  m.height = height;
  m.mask = std::move(bits);
  m.observed = std::move(observed);
  return m;
}

MicMask MicMask::all(std::size_t width, std::size_t height) {
  return from_bits(width, height, std::vector<std::uint8_t>(width * height, 1));
}

void MicMask::validate() const {
  if (mask.size() != width * height) throw DataError("MicMask: mask size does not match the grid");
  std::size_t ones = 0;
  for (auto b : mask) ones += b != 0;
  if (ones != observed.size()) throw DataError("MicMask: observed list disagrees with mask");
  for (const auto& [w, h] : observed) {
    if (w >= width || h >= height || !mask[w * height + h]) {
      throw DataError("MicMask: observed index not set in mask");
    }
  }
}

void GenConfig::validate() const {
  if (n_rooms == 0) throw ArgumentError("GenConfig: n_rooms must be positive");
  if (!(split > 0.0 && split < 1.0)) throw ArgumentError("GenConfig: split must lie in (0, 1)");
  if (t60_choices.empty()) throw ArgumentError("GenConfig: t60_choices is empty");
  for (double t : t60_choices) {
    if (!(t > 0.0)) throw ArgumentError("GenConfig: t60_choices must be positive");
  }
  if (mic_choices.empty()) throw ArgumentError("GenConfig: mic_choices is empty");
  for (auto m : mic_choices) {
    if (m == 0 || m > grid_w * grid_h) throw ArgumentError("GenConfig: mic count " + std::to_string(m) + " does not fit the grid");
  }
  if (k == 0) throw ArgumentError("GenConfig: k must be at least 1");
  if (!(f_lo > 0.0 && f_lo < f_hi)) throw ArgumentError("GenConfig: need 0 < f_lo < f_hi");
  if (!(f_hi <= f_cutoff)) throw ArgumentError("GenConfig: f_hi above the modal cutoff");
  if (grid_w < 2 || grid_h < 2) throw ArgumentError("GenConfig: grid needs at least 2 points per axis");
  if (!(speed_of_sound > 0.0)) throw ArgumentError("GenConfig: speed_of_sound must be positive");
}

std::size_t GenConfig::n_train() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n_rooms) * split));
}

bool satisfies_listening_room_ratios(const RoomSpec& r) {
  const double x = r.lx / r.lz;
  const double y = r.ly / r.lz;
  return r.lx >= r.ly && x <= 4.5 * y - 4.0 && x < 3.0 && y < 3.0;
}

RoomSpec sample_room(Rng& rng, const RoomSampling& sampling) {
  if (sampling.t60_choices.empty()) throw ArgumentError("sample_room: no T60 choices");
  for (std::size_t attempt = 0; attempt < sampling.max_attempts; ++attempt) {
    RoomSpec room;
    room.lz = rng.uniform(2.3, 3.0);
    const double area = rng.uniform(20.0, 60.0);
    const double aspect = rng.uniform(1.0, 3.0);  // Lx / Ly
    room.lx = std::sqrt(area * aspect);
    room.ly = std::sqrt(area / aspect);
    if (!satisfies_listening_room_ratios(room)) continue;
    room.t60 = sampling.t60_choices[rng.index(sampling.t60_choices.size())];
    const double m = sampling.wall_margin;
    room.source = {rng.uniform(m, room.lx - m), rng.uniform(m, room.ly - m),
                   rng.uniform(m, room.lz - m)};
    room.z_plane = room.lz / 2.0;
    room.grid_w = sampling.grid_w;
    room.grid_h = sampling.grid_h;
    room.speed_of_sound = sampling.speed_of_sound;
    return room;
  }
  throw ResourceError("sample_room: rejection budget of " + std::to_string(sampling.max_attempts) +
                      " draws exhausted");
}

MicMask sample_mask(Rng& rng, std::size_t m, std::size_t width, std::size_t height) {
  const std::size_t n = width * height;
  if (m > n) {
    throw ArgumentError("sample_mask: " + std::to_string(m) + " microphones exceed " +
                        std::to_string(n) + " grid points");
  }
  std::vector<std::size_t> cells(n);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  std::vector<std::pair<std::size_t, std::size_t>> observed;
  observed.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(cells[i], cells[j]);
    observed.emplace_back(cells[i] / height, cells[i] % height);
  }
  return MicMask::from_observed(width, height, std::move(observed));
}

namespace {

void expect_mask_matches(const FieldGrid& field, const MicMask& mask, const char* what) {
  if (field.width != mask.width || field.height != mask.height) {
    throw ArgumentError(std::string(what) + ": mask " + std::to_string(mask.width) + "x" +
                        std::to_string(mask.height) + " does not match field " +
                        std::to_string(field.width) + "x" + std::to_string(field.height));
  }
}

}  // namespace

FieldGrid apply_mask(const FieldGrid& field, const MicMask& mask) {
  expect_mask_matches(field, mask, "apply_mask");
  FieldGrid out = field;
  const std::size_t k = field.num_freqs();
  for (std::size_t p = 0; p < field.width * field.height; ++p) {
    if (!mask.mask[p]) std::fill_n(out.data.begin() + p * k, k, std::complex<double>{});
  }
  return out;
}

template <typename T>
cvnn::ComplexTensor<T> build_input(const FieldGrid& masked, const MicMask& mask) {
  expect_mask_matches(masked, mask, "build_input");
  const std::size_t k = masked.num_freqs();
  cvnn::ComplexTensor<T> x({masked.width, masked.height, 2 * k});
  for (std::size_t p = 0; p < masked.width * masked.height; ++p) {
    const T m = mask.mask[p] ? T(1) : T(0);
    for (std::size_t f = 0; f < k; ++f) {
      const auto v = masked.data[p * k + f];
      x[p * 2 * k + f] = {static_cast<T>(v.real()), static_cast<T>(v.imag())};
      x[p * 2 * k + k + f] = {m, T(0)};
    }
  }
  return x;
}

template <typename T>
cvnn::ComplexTensor<T> field_tensor(const FieldGrid& field) {
  cvnn::ComplexTensor<T> x({field.width, field.height, field.num_freqs()});
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    x[i] = {static_cast<T>(field.data[i].real()), static_cast<T>(field.data[i].imag())};
  }
  return x;
}

template cvnn::ComplexTensor<float> build_input(const FieldGrid&, const MicMask&);
template cvnn::ComplexTensor<double> build_input(const FieldGrid&, const MicMask&);
template cvnn::ComplexTensor<float> field_tensor(const FieldGrid&);
template cvnn::ComplexTensor<double> field_tensor(const FieldGrid&);

FieldGrid field_from_tensor(std::span<const std::complex<double>> values, std::size_t width,
                            std::size_t height, const std::vector<double>& freqs) {
  FieldGrid g(width, height, freqs);
  if (values.size() != g.data.size()) throw ArgumentError("field_from_tensor: size mismatch");
  std::copy(values.begin(), values.end(), g.data.begin());
  return g;
}

std::vector<double> frequency_grid(std::size_t k, double f_lo, double f_hi) {
  if (k == 0) throw ArgumentError("frequency_grid: k must be positive");
  if (k == 1) return {f_lo};
  std::vector<double> f(k);
  for (std::size_t i = 0; i < k; ++i) {
    f[i] = f_lo + (f_hi - f_lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  }
  return f;
}

SampleRecord generate_record(const GenConfig& config, std::size_t index) {
  SampleRecord record;
  record.seed = derive_seed(config.seed, index);
  Rng rng(record.seed);
  RoomSampling sampling;
  sampling.t60_choices = config.t60_choices;
  sampling.grid_w = config.grid_w;
  sampling.grid_h = config.grid_h;
  sampling.speed_of_sound = config.speed_of_sound;
  record.room = sample_room(rng, sampling);
  const std::vector<double> freqs = frequency_grid(config.k, config.f_lo, config.f_hi);
  SynthesisOptions options;
  options.f_cutoff = config.f_cutoff;
  options.damping = config.damping;
  record.field = synthesize_field(record.room, freqs, options);
  record.field.room_id = record_file_name(index);
  const std::size_t m = config.mic_choices[rng.index(config.mic_choices.size())];
  record.mask = sample_mask(rng, m, config.grid_w, config.grid_h);
  return record;
}

Dataset generate_dataset(const GenConfig& config, std::size_t threads) {
  config.validate();
  std::vector<SampleRecord> records(config.n_rooms);
  parallel_for(config.n_rooms, threads,
               [&](std::size_t i) { records[i] = generate_record(config, i); });
  Dataset ds;
  ds.config = config;
  ds.freqs = frequency_grid(config.k, config.f_lo, config.f_hi);
  const std::size_t n_train = config.n_train();
  ds.train.assign(std::make_move_iterator(records.begin()),
                  std::make_move_iterator(records.begin() + n_train));
  ds.validation.assign(std::make_move_iterator(records.begin() + n_train),
                       std::make_move_iterator(records.end()));
  return ds;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string record_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "room_%05zu.mdf", index);
  return buf;
}

}  // namespace rtfnet
