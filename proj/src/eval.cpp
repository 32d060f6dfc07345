#include "rtfnet/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rtfnet/errors.hpp"

namespace rtfnet {

namespace {

double ratio_db(double num, double den, const FieldGrid& target, std::size_t k) {
  if (!(den > 0.0)) {
    throw DataError("NMSE undefined: target " + target.room_id + " has zero energy at frequency index " +
                    std::to_string(k));
  }
  if (num <= 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(num / den));
}

void check_pair(const FieldGrid& estimate, const FieldGrid& target, std::size_t k) {
  if (!estimate.same_shape(target)) throw ArgumentError("NMSE: estimate and target shapes differ");
  if (k >= target.num_freqs()) throw ArgumentError("NMSE: frequency index out of range");
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

double nmse_abs(const FieldGrid& estimate, const FieldGrid& target, std::size_t k) {
  check_pair(estimate, target, k);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t w = 0; w < target.width; ++w) {
    for (std::size_t h = 0; h < target.height; ++h) {
      const double g = std::abs(target.at(w, h, k));
      const double d = std::abs(estimate.at(w, h, k)) - g;
      num += d * d;
      den += g * g;
    }
  }
  return ratio_db(num, den, target, k);
}

double nmse_complex(const FieldGrid& estimate, const FieldGrid& target, std::size_t k) {
  check_pair(estimate, target, k);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t w = 0; w < target.width; ++w) {
    for (std::size_t h = 0; h < target.height; ++h) {
      num += std::norm(estimate.at(w, h, k) - target.at(w, h, k));
      den += std::norm(target.at(w, h, k));
    }
  }
  return ratio_db(num, den, target, k);
}

double MetricReport::mean_nmse_complex() const { return mean(per_freq_nmse_complex); }
double MetricReport::mean_nmse_abs() const { return mean(per_freq_nmse_abs); }

FieldGrid KernelReconstructor::reconstruct(const SampleRecord& record) {
  return reconstruct_field(record, lambda_, 1);
}

CvnnReconstructor::CvnnReconstructor(std::unique_ptr<cvnn::UNet<float>> model) : model_(std::move(model)) {
  if (!model_) throw ArgumentError("cvnn reconstructor needs a model");
}

FieldGrid CvnnReconstructor::reconstruct(const SampleRecord& record) {
  const FieldGrid& field = record.field;
  if (model_->spec().out_channels != field.num_freqs()) {
    throw DataError("model predicts " + std::to_string(model_->spec().out_channels) +
                    " frequencies, dataset has " + std::to_string(field.num_freqs()));
  }
  auto input = build_input<float>(apply_mask(field, record.mask), record.mask);
  input.reshape({1, field.width, field.height, 2 * field.num_freqs()});
  const auto out = model_->forward(input, cvnn::Phase::kInference);
  std::vector<std::complex<double>> values(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = {out[i].real(), out[i].imag()};
  FieldGrid est = field_from_tensor(values, field.width, field.height, field.freqs);
  est.room_id = field.room_id;
  return est;
}

SampleRecord with_mask(const SampleRecord& record, MicMask mask) {
  SampleRecord out = record;
  out.mask = std::move(mask);
  return out;
}

MicMask paired_mask(const SampleRecord& record, std::size_t m, std::uint64_t seed) {
  Rng rng(derive_seed(derive_seed(seed, m), record.seed));
  return sample_mask(rng, m, record.field.width, record.field.height);
}

MetricReport evaluate(Reconstructor& method, const std::vector<SampleRecord>& records, std::size_t threads) {
  if (records.empty()) throw DataError("evaluation set is empty");
  const auto& freqs = records.front().field.freqs;
  const std::size_t k_count = freqs.size();
  for (const auto& r : records) {
    if (r.field.freqs != freqs) throw DataError("records " + r.field.room_id + " use a different frequency grid");
  }
  std::vector<std::vector<double>> cx(records.size()), ab(records.size());
  auto one = [&](std::size_t i) {
    const FieldGrid est = method.reconstruct(records[i]);
    cx[i].resize(k_count);
    ab[i].resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      cx[i][k] = nmse_complex(est, records[i].field, k);
      ab[i][k] = nmse_abs(est, records[i].field, k);
    }
  };
  if (method.concurrent()) {
    parallel_for(records.size(), threads, one);
  } else {
    for (std::size_t i = 0; i < records.size(); ++i) one(i);
  }

  MetricReport rep;
  rep.method = method.name();
  rep.sweep = "dataset";
  rep.freqs = freqs;
  rep.n_rooms = records.size();
  rep.per_freq_nmse_complex.assign(k_count, 0.0);
  rep.per_freq_nmse_abs.assign(k_count, 0.0);
  // Fixed summation order keeps results independent of the thread count.
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      rep.per_freq_nmse_complex[k] += cx[i][k];
      rep.per_freq_nmse_abs[k] += ab[i][k];
    }
    rep.per_room_nmse_complex.push_back(mean(cx[i]));
    rep.per_room_nmse_abs.push_back(mean(ab[i]));
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    rep.per_freq_nmse_complex[k] /= static_cast<double>(records.size());
    rep.per_freq_nmse_abs[k] /= static_cast<double>(records.size());
  }
  return rep;
}

std::vector<SampleRecord> select_t60(const std::vector<SampleRecord>& records, double t60) {
  std::vector<SampleRecord> out;
  for (const auto& r : records) {
    if (std::abs(r.room.t60 - t60) < 1e-6) out.push_back(r);
  }
  return out;
}

std::vector<MetricReport> sweep_t60(Reconstructor& method, const std::vector<SampleRecord>& records,
                                    const std::vector<double>& t60_levels, std::size_t m,
                                    std::uint64_t seed, std::size_t threads) {
  std::vector<MetricReport> out;
  for (double level : t60_levels) {
    auto subset = select_t60(records, level);
    if (subset.empty()) throw DataError("no evaluation records at T60 = " + fmt(level) + " s");
    for (auto& r : subset) r.mask = paired_mask(r, m, seed);
    MetricReport rep = evaluate(method, subset, threads);
    rep.sweep = "t60";
    rep.sweep_key = level;
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<MetricReport> sweep_mics(Reconstructor& method, const std::vector<SampleRecord>& records,
                                     const std::vector<std::size_t>& mic_counts, std::uint64_t seed,
                                     std::size_t threads) {
  std::vector<MetricReport> out;
  for (std::size_t m : mic_counts) {
    std::vector<SampleRecord> subset = records;
    for (auto& r : subset) r.mask = paired_mask(r, m, seed);
    MetricReport rep = evaluate(method, subset, threads);
    rep.sweep = "mics";
    rep.sweep_key = static_cast<double>(m);
    out.push_back(std::move(rep));
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricReport>& reports) {
  std::string out = "method,sweep,sweep_key,freq_hz,nmse_complex_db,nmse_abs_db,n_rooms\n";
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.freqs.size(); ++k) {
      out += r.method + "," + r.sweep + "," + fmt(r.sweep_key) + "," + fmt(r.freqs[k]) + "," +
             fmt(r.per_freq_nmse_complex[k]) + "," + fmt(r.per_freq_nmse_abs[k]) + "," +
             std::to_string(r.n_rooms) + "\n";
    }
  }
  return out;
}

std::vector<MetricReport> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("method,sweep,sweep_key,freq_hz", 0) != 0) {
    throw DataError("metrics CSV: missing header");
  }
  std::vector<MetricReport> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw DataError("metrics CSV line " + std::to_string(line_no) + ": expected 7 columns");
    try {
      const double key = std::stod(cells[2]);
      if (out.empty() || out.back().method != cells[0] || out.back().sweep != cells[1] ||
          out.back().sweep_key != key) {
        MetricReport r;
        r.method = cells[0];
        r.sweep = cells[1];
        r.sweep_key = key;
        r.n_rooms = std::stoul(cells[6]);
        out.push_back(std::move(r));
      }
      auto& r = out.back();
      r.freqs.push_back(std::stod(cells[3]));
      r.per_freq_nmse_complex.push_back(std::stod(cells[4]));
      r.per_freq_nmse_abs.push_back(std::stod(cells[5]));
    } catch (const std::logic_error&) {
      throw DataError("metrics CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rtfnet
