#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rtfnet/cvnn/tensor.hpp"
#include "rtfnet/field_grid.hpp"
#include "rtfnet/modal_sim.hpp"
#include "rtfnet/rng.hpp"

namespace rtfnet {

inline const std::vector<double> kDefaultT60Levels{0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6};
inline const std::vector<std::size_t> kDefaultMicCounts{5, 10, 15, 35, 55};

/// Binary observation mask over the W x H grid plus the observed index list.
struct MicMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> mask;  // index w * height + h
  std::vector<std::pair<std::size_t, std::size_t>> observed;

  std::size_t count() const { return observed.size(); }
  bool is_observed(std::size_t w, std::size_t h) const { return mask[w * height + h] != 0; }

  static MicMask from_observed(std::size_t width, std::size_t height,
                               std::vector<std::pair<std::size_t, std::size_t>> observed);
  // Observed list is rebuilt in row-major order.
  static MicMask from_bits(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);
  static MicMask all(std::size_t width, std::size_t height);

  void validate() const;
};

struct GenConfig {
  std::size_t n_rooms = 5000;
  double split = 0.75;
  std::vector<double> t60_choices = kDefaultT60Levels;
  std::vector<std::size_t> mic_choices = kDefaultMicCounts;
  std::size_t k = 40;
  double f_lo = 30.0;
  double f_hi = 300.0;
  double f_cutoff = kDefaultModalCutoffHz;
  std::size_t grid_w = 32;
  std::size_t grid_h = 32;
  double speed_of_sound = kDefaultSpeedOfSound;
  DampingModel damping = DampingModel::kWavenumber;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t n_train() const;
};

struct SampleRecord {
  RoomSpec room;
  FieldGrid field;
  MicMask mask;
  std::uint64_t seed = 0;
};

struct Dataset {
  GenConfig config;
  std::vector<double> freqs;
  std::vector<SampleRecord> train;
  std::vector<SampleRecord> validation;
};

struct RoomSampling {
  std::vector<double> t60_choices = kDefaultT60Levels;
  std::size_t grid_w = 32;
  std::size_t grid_h = 32;
  double speed_of_sound = kDefaultSpeedOfSound;
  double wall_margin = 0.1;
  std::size_t max_attempts = 100000;
};

// Listening-room geometry by rejection sampling (height 2.3-3.0 m, floor
// area 20-60 m^2, Lx >= Ly, Lx/Lz <= 4.5 Ly/Lz - 4, Lx/Lz < 3, Ly/Lz < 3),
// T60 drawn from the choice list, source in the interior away from walls,
// measurement plane at half height.
RoomSpec sample_room(Rng& rng, const RoomSampling& sampling = {});
bool satisfies_listening_room_ratios(const RoomSpec& room);

// m distinct grid points drawn uniformly without replacement.
MicMask sample_mask(Rng& rng, std::size_t m, std::size_t width, std::size_t height);

// Zero every unobserved grid point.
FieldGrid apply_mask(const FieldGrid& field, const MicMask& mask);

// K field channels followed by K copies of the mask: shape [W, H, 2K].
template <typename T>
cvnn::ComplexTensor<T> build_input(const FieldGrid& masked, const MicMask& mask);

// Field as a [W, H, K] tensor, and back.
template <typename T>
cvnn::ComplexTensor<T> field_tensor(const FieldGrid& field);
FieldGrid field_from_tensor(std::span<const std::complex<double>> values, std::size_t width,
                            std::size_t height, const std::vector<double>& freqs);

// K points evenly spaced on [f_lo, f_hi], both ends included.
std::vector<double> frequency_grid(std::size_t k, double f_lo, double f_hi);

// Record `index` depends only on (config, index).
SampleRecord generate_record(const GenConfig& config, std::size_t index);
Dataset generate_dataset(const GenConfig& config, std::size_t threads = 1);

// ---- persistence -------------------------------------------------------

inline constexpr std::uint32_t kDatasetFormatVersion = 1;
inline constexpr std::size_t kRecordHeaderBytes = 64;

std::vector<std::uint8_t> encode_record(const SampleRecord& record);
// `allow_missing_t60` admits a NaN T60 in the header (measured grids).
SampleRecord decode_record(std::span<const std::uint8_t> bytes, const std::vector<double>& freqs,
                           bool allow_missing_t60 = false);

void write_record(const std::filesystem::path& path, const SampleRecord& record);
SampleRecord read_record(const std::filesystem::path& path, const std::vector<double>& freqs);

// Writes meta.json and one record file per room. Refuses a non-empty
// directory unless `force`.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset, bool force = false);
Dataset load_dataset(const std::filesystem::path& dir);
std::string record_file_name(std::size_t index);

struct MeasuredGridLayout {
  std::size_t width = 32;
  std::size_t height = 32;
  std::vector<double> freqs;
  // When set, a fresh mask with this many microphones replaces the file's.
  std::optional<std::size_t> mics;
  std::uint64_t mask_seed = 0;
};

SampleRecord import_measured_grid(const std::filesystem::path& path, const MeasuredGridLayout& layout);

// Multi-threaded map over [0, n); fn(i) must only touch slot i.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace rtfnet
