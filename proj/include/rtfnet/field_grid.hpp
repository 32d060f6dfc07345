#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace rtfnet {

/// Complex RTFs over a W x H microphone grid at K frequencies.
/// Storage is row-major with w outermost, then h, then frequency.
struct FieldGrid {
  std::size_t width = 0;   // W
  std::size_t height = 0;  // H
  std::vector<double> freqs;
  std::vector<std::complex<double>> data;
  std::string room_id;

  FieldGrid() = default;
  FieldGrid(std::size_t w, std::size_t h, std::vector<double> frequencies);

  std::size_t num_freqs() const { return freqs.size(); }
  std::size_t offset(std::size_t w, std::size_t h, std::size_t k) const {
    return (w * height + h) * freqs.size() + k;
  }
  std::complex<double>& at(std::size_t w, std::size_t h, std::size_t k) {
    return data[offset(w, h, k)];
  }
  const std::complex<double>& at(std::size_t w, std::size_t h, std::size_t k) const {
    return data[offset(w, h, k)];
  }

  bool same_shape(const FieldGrid& other) const {
    return width == other.width && height == other.height &&
           freqs.size() == other.freqs.size();
  }

  // Throws DataError when the frequency list is not strictly increasing,
  // the payload size is wrong, or any entry is non-finite.
  void validate() const;
};

}  // namespace rtfnet
