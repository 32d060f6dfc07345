#include "rtfnet/field_grid.hpp"

#include <cmath>
#include <string>

#include "rtfnet/errors.hpp"

namespace rtfnet {

FieldGrid::FieldGrid(std::size_t w, std::size_t h, std::vector<double> frequencies)
    : width(w), height(h), freqs(std::move(frequencies)), data(w * h * freqs.size()) {}

void FieldGrid::validate() const {
  if (data.size() != width * height * freqs.size()) {
    throw DataError("FieldGrid: payload holds " + std::to_string(data.size()) +
                    " entries, expected " + std::to_string(width * height * freqs.size()));
  }
  for (std::size_t k = 1; k < freqs.size(); ++k) {
    if (!(freqs[k] > freqs[k - 1])) throw DataError("FieldGrid: frequencies not strictly increasing");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].real()) || !std::isfinite(data[i].imag())) {
      const std::size_t k = i % freqs.size();
      const std::size_t h = (i / freqs.size()) % height;
      const std::size_t w = i / (freqs.size() * height);
      throw DataError("FieldGrid: non-finite entry at (w=" + std::to_string(w) + ", h=" +
                      std::to_string(h) + ", k=" + std::to_string(k) + ")");
    }
  }
}

}  // namespace rtfnet
