#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rtfnet/field_grid.hpp"

namespace rtfnet {

using Vec3 = std::array<double, 3>;

inline constexpr double kDefaultSpeedOfSound = 343.0;
inline constexpr double kDefaultModalCutoffHz = 400.0;
inline constexpr std::size_t kDefaultMaxModes = 200000;
inline constexpr double kDegenerateDenominator = 1e-300;

/// Shoebox room with a single point source and a horizontal measurement
/// grid at height z_plane spanning the full floor.
struct RoomSpec {
  double lx = 0.0;
  double ly = 0.0;
  double lz = 0.0;
  double t60 = 0.0;
  Vec3 source{};
  double z_plane = 0.0;
  std::size_t grid_w = 32;
  std::size_t grid_h = 32;
  double speed_of_sound = kDefaultSpeedOfSound;

  double volume() const { return lx * ly * lz; }
  bool contains(const Vec3& p) const;
  // Throws ArgumentError on violated invariants.
  void validate() const;
};

struct Mode {
  std::array<int, 3> index{};
  double omega = 0.0;  // rad/s
  double tau = 0.0;    // s
  double norm = 1.0;   // sqrt(eps_x eps_y eps_z)
};

/// How the modal damping term enters the denominator.
///   kWavenumber: (w/c)^2 - (w_n/c)^2 - j w / (tau_n c^2)   (dimensionally consistent)
///   kLiteral:    (w/c)^2 - (w_n/c)^2 - j w / tau_n
enum class DampingModel { kWavenumber, kLiteral };

// Uniform decay time: amplitude envelope exp(-t/tau) is -60 dB at t = T60.
double decay_time(double t60);

double eigen_omega(const std::array<int, 3>& index, const RoomSpec& room);

Vec3 grid_point(const RoomSpec& room, std::size_t w, std::size_t h);

// Point (w, h) lives at index w * grid_h + h.
std::vector<Vec3> grid_coordinates(const RoomSpec& room);

// Every mode with eigenfrequency <= f_cutoff, ascending by omega with ties
// broken lexicographically by index. Throws ResourceError above max_modes.
std::vector<Mode> enumerate_modes(const RoomSpec& room, double f_cutoff,
                                  std::size_t max_modes = kDefaultMaxModes);

double mode_shape(const Mode& mode, const Vec3& position, const RoomSpec& room);

// Truncated modal sum at angular frequency omega for the room's source.
// Throws NumericalError when any denominator magnitude is below 1e-300.
std::complex<double> rtf(const RoomSpec& room, const Vec3& receiver, double omega,
                         std::span<const Mode> modes,
                         DampingModel damping = DampingModel::kWavenumber);

struct SynthesisOptions {
  double f_cutoff = kDefaultModalCutoffHz;
  std::size_t max_modes = kDefaultMaxModes;
  DampingModel damping = DampingModel::kWavenumber;
};

// Field on the room's grid at each frequency (Hz). Modes are enumerated once.
FieldGrid synthesize_field(const RoomSpec& room, std::span<const double> freqs,
                           const SynthesisOptions& options = {});

}  // namespace rtfnet
