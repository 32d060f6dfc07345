#include "rtfnet/modal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rtfnet/errors.hpp"

namespace rtfnet {

namespace {

constexpr double kPi = std::numbers::pi;

double axis_shape(int n, double x, double length) {
  return n == 0 ? 1.0 : std::cos(n * kPi * x / length);
}

std::complex<double> denominator(double omega, const Mode& mode, double c, DampingModel damping) {
  // Difference taken before scaling: near resonance it is exact.
  const double detune = (omega - mode.omega) * (omega + mode.omega) / (c * c);
  const double loss = damping == DampingModel::kWavenumber ? omega / (mode.tau * c * c)
                                                           : omega / mode.tau;
  return {detune, -loss};
}

void check_denominator(const std::complex<double>& d, const Mode& mode) {
  if (std::abs(d) < kDegenerateDenominator) {
    throw NumericalError("rtf: degenerate denominator for mode (" + std::to_string(mode.index[0]) +
                         "," + std::to_string(mode.index[1]) + "," +
                         std::to_string(mode.index[2]) + ")");
  }
}

}  // namespace

bool RoomSpec::contains(const Vec3& p) const {
  return p[0] >= 0.0 && p[0] <= lx && p[1] >= 0.0 && p[1] <= ly && p[2] >= 0.0 && p[2] <= lz;
}

void RoomSpec::validate() const {
  if (!(lx > 0.0 && ly > 0.0 && lz > 0.0)) throw ArgumentError("RoomSpec: dimensions must be positive");
  if (!(t60 > 0.0)) throw ArgumentError("RoomSpec: T60 must be positive");
  if (!contains(source)) throw ArgumentError("RoomSpec: source lies outside the room");
  if (!(z_plane >= 0.0 && z_plane <= lz)) throw ArgumentError("RoomSpec: z_plane outside [0, Lz]");
  if (grid_w < 2 || grid_h < 2) throw ArgumentError("RoomSpec: grid needs at least 2 points per axis");
  if (!(speed_of_sound > 0.0)) throw ArgumentError("RoomSpec: speed of sound must be positive");
}

double decay_time(double t60) { return t60 / (3.0 * std::log(10.0)); }

double eigen_omega(const std::array<int, 3>& n, const RoomSpec& room) {
  const double a = n[0] / room.lx;
  const double b = n[1] / room.ly;
  const double c = n[2] / room.lz;
  return room.speed_of_sound * kPi * std::sqrt(a * a + b * b + c * c);
}

Vec3 grid_point(const RoomSpec& room, std::size_t w, std::size_t h) {
  return {static_cast<double>(w) * (room.lx / static_cast<double>(room.grid_w - 1)),
          static_cast<double>(h) * (room.ly / static_cast<double>(room.grid_h - 1)), room.z_plane};
}

std::vector<Vec3> grid_coordinates(const RoomSpec& room) {
  room.validate();
  std::vector<Vec3> points;
  points.reserve(room.grid_w * room.grid_h);
  for (std::size_t w = 0; w < room.grid_w; ++w) {
    for (std::size_t h = 0; h < room.grid_h; ++h) points.push_back(grid_point(room, w, h));
  }
  return points;
}

std::vector<Mode> enumerate_modes(const RoomSpec& room, double f_cutoff, std::size_t max_modes) {
  room.validate();
  if (!(f_cutoff > 0.0)) throw ArgumentError("enumerate_modes: cutoff must be positive");
  const double omega_max = 2.0 * kPi * f_cutoff;
  const double tau = decay_time(room.t60);
  // omega_n <= omega_max implies n_axis <= 2 f L / c on each axis.
  const int nx_max = static_cast<int>(std::floor(2.0 * f_cutoff * room.lx / room.speed_of_sound));
  const int ny_max = static_cast<int>(std::floor(2.0 * f_cutoff * room.ly / room.speed_of_sound));
  const int nz_max = static_cast<int>(std::floor(2.0 * f_cutoff * room.lz / room.speed_of_sound));

  std::vector<Mode> modes;
  for (int nx = 0; nx <= nx_max; ++nx) {
    for (int ny = 0; ny <= ny_max; ++ny) {
      for (int nz = 0; nz <= nz_max; ++nz) {
        const std::array<int, 3> idx{nx, ny, nz};
        const double omega = eigen_omega(idx, room);
        if (omega > omega_max) continue;
        if (modes.size() >= max_modes) {
          throw ResourceError("enumerate_modes: more than " + std::to_string(max_modes) +
                              " modes below " + std::to_string(f_cutoff) + " Hz");
        }
        const double norm = std::sqrt((nx > 0 ? 2.0 : 1.0) * (ny > 0 ? 2.0 : 1.0) *
                                      (nz > 0 ? 2.0 : 1.0));
        modes.push_back(Mode{idx, omega, tau, norm});
      }
    }
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.omega != b.omega) return a.omega < b.omega;
    return a.index < b.index;
  });
  return modes;
}

double mode_shape(const Mode& mode, const Vec3& p, const RoomSpec& room) {
  return mode.norm * axis_shape(mode.index[0], p[0], room.lx) *
         axis_shape(mode.index[1], p[1], room.ly) * axis_shape(mode.index[2], p[2], room.lz);
}

std::complex<double> rtf(const RoomSpec& room, const Vec3& receiver, double omega,
                         std::span<const Mode> modes, DampingModel damping) {
  if (modes.empty()) throw ArgumentError("rtf: empty mode list");
  if (!(omega > 0.0)) throw ArgumentError("rtf: omega must be positive");
  std::complex<double> sum{0.0, 0.0};
  for (const Mode& mode : modes) {
    const std::complex<double> d = denominator(omega, mode, room.speed_of_sound, damping);
    check_denominator(d, mode);
    sum += mode_shape(mode, receiver, room) * mode_shape(mode, room.source, room) / d;
  }
  return -sum / room.volume();
}

FieldGrid synthesize_field(const RoomSpec& room, std::span<const double> freqs,
                           const SynthesisOptions& options) {
  room.validate();
  for (double f : freqs) {
    if (!(f > 0.0 && f <= options.f_cutoff)) {
      throw ArgumentError("synthesize_field: frequency " + std::to_string(f) +
                          " Hz outside (0, cutoff]");
    }
  }
  const std::vector<Mode> modes = enumerate_modes(room, options.f_cutoff, options.max_modes);
  const std::vector<Vec3> points = grid_coordinates(room);
  const std::size_t n_modes = modes.size();

  std::vector<double> source_shape(n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) source_shape[n] = mode_shape(modes[n], room.source, room);

  // Reciprocal denominators, one row per frequency.
  std::vector<std::complex<double>> inv_denom(freqs.size() * n_modes);
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double omega = 2.0 * kPi * freqs[k];
    for (std::size_t n = 0; n < n_modes; ++n) {
      const auto d = denominator(omega, modes[n], room.speed_of_sound, options.damping);
      check_denominator(d, modes[n]);
      inv_denom[k * n_modes + n] = 1.0 / d;
    }
  }

  FieldGrid field(room.grid_w, room.grid_h, std::vector<double>(freqs.begin(), freqs.end()));
  const double inv_volume = 1.0 / room.volume();
  std::vector<double> weight(n_modes);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t n = 0; n < n_modes; ++n) {
      weight[n] = mode_shape(modes[n], points[p], room) * source_shape[n];
    }
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      const std::complex<double>* row = &inv_denom[k * n_modes];
      std::complex<double> sum{0.0, 0.0};
      for (std::size_t n = 0; n < n_modes; ++n) sum += weight[n] * row[n];
      field.data[p * freqs.size() + k] = -sum * inv_volume;
    }
  }
  return field;
}

}  // namespace rtfnet
