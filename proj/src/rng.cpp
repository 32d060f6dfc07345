#include "rtfnet/rng.hpp"

#include <limits>
#include <sstream>

#include "rtfnet/errors.hpp"

namespace rtfnet {

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ArgumentError("Rng::index: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Largest multiple of bound representable; draws above it are rejected.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::set_state(const std::string& state) {
  std::istringstream in(state);
  in >> engine_;
  if (in.fail()) throw DataError("Rng::set_state: malformed engine state");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rtfnet
