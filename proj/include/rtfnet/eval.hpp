#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rtfnet/cvnn/unet.hpp"
#include "rtfnet/dataset.hpp"
#include "rtfnet/field_grid.hpp"
#include "rtfnet/kernel_baseline.hpp"

namespace rtfnet {

inline constexpr double kNmseFloorDb = -300.0;

// 10 log10( sum (|est| - |tgt|)^2 / sum |tgt|^2 ) at frequency index k.
double nmse_abs(const FieldGrid& estimate, const FieldGrid& target, std::size_t k);
// 10 log10( sum |est - tgt|^2 / sum |tgt|^2 ) at frequency index k.
double nmse_complex(const FieldGrid& estimate, const FieldGrid& target, std::size_t k);

struct MetricReport {
  std::string method;
  std::string sweep;  // "t60", "mics" or "dataset"
  double sweep_key = 0.0;
  std::vector<double> freqs;
  std::vector<double> per_freq_nmse_complex;  // dB, mean over rooms
  std::vector<double> per_freq_nmse_abs;
  std::size_t n_rooms = 0;
  // Frequency-averaged dB per room, in input order.
  std::vector<double> per_room_nmse_complex;
  std::vector<double> per_room_nmse_abs;

  double mean_nmse_complex() const;
  double mean_nmse_abs() const;
};

/// Anything that turns a masked record into a full-grid estimate.
class Reconstructor {
 public:
  virtual ~Reconstructor() = default;
  virtual std::string name() const = 0;
  virtual FieldGrid reconstruct(const SampleRecord& record) = 0;
  // True when reconstruct may run concurrently on different records.
  virtual bool concurrent() const { return false; }
};

class KernelReconstructor final : public Reconstructor {
 public:
  explicit KernelReconstructor(double lambda = kDefaultKernelLambda) : lambda_(lambda) {}
  std::string name() const override { return "kernel"; }
  FieldGrid reconstruct(const SampleRecord& record) override;
  bool concurrent() const override { return true; }

 private:
  double lambda_;
};

class CvnnReconstructor final : public Reconstructor {
 public:
  explicit CvnnReconstructor(std::unique_ptr<cvnn::UNet<float>> model);
  std::string name() const override { return "cvnn"; }
  FieldGrid reconstruct(const SampleRecord& record) override;

 private:
  std::unique_ptr<cvnn::UNet<float>> model_;
};

// Record as it would be observed through `mask`.
SampleRecord with_mask(const SampleRecord& record, MicMask mask);

// Mask with m microphones shared by every method for this record.
MicMask paired_mask(const SampleRecord& record, std::size_t m, std::uint64_t seed);

// Reconstructs every record with its own mask and averages dB over rooms.
MetricReport evaluate(Reconstructor& method, const std::vector<SampleRecord>& records,
                      std::size_t threads = 1);

// One report per T60 level, masks of m mics from paired_mask. Throws
// DataError when a level has no records.
std::vector<MetricReport> sweep_t60(Reconstructor& method, const std::vector<SampleRecord>& records,
                                    const std::vector<double>& t60_levels, std::size_t m,
                                    std::uint64_t seed, std::size_t threads = 1);

// One report per mic count.
std::vector<MetricReport> sweep_mics(Reconstructor& method, const std::vector<SampleRecord>& records,
                                     const std::vector<std::size_t>& mic_counts, std::uint64_t seed,
                                     std::size_t threads = 1);

// Records whose T60 equals `t60` to within 1e-6 s.
std::vector<SampleRecord> select_t60(const std::vector<SampleRecord>& records, double t60);

// Columns: method,sweep,sweep_key,freq_hz,nmse_complex_db,nmse_abs_db,n_rooms
std::string metrics_csv(const std::vector<MetricReport>& reports);
std::vector<MetricReport> parse_metrics_csv(const std::string& text);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace rtfnet
