#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

#include "rtfnet/errors.hpp"
#include "rtfnet/plot.hpp"

namespace rtfnet {

namespace {

using Rgb = std::array<double, 3>;

Rgb lerp_table(std::span<const Rgb> table, double t) {
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(table.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(t), table.size() - 2);
  const double f = t - static_cast<double>(i);
  Rgb out;
  for (int c = 0; c < 3; ++c) out[c] = table[i][c] * (1.0 - f) + table[i + 1][c] * f;
  return out;
}

Rgb color(Colormap map, double t) {
  static constexpr std::array<Rgb, 6> kViridis{{{0.267, 0.005, 0.329},
                                                 {0.254, 0.265, 0.530},
                                                 {0.164, 0.471, 0.558},
                                                 {0.135, 0.659, 0.518},
                                                 {0.478, 0.821, 0.318},
                                                 {0.993, 0.906, 0.144}}};
  // Cyclic: the first and last entries agree so +pi and -pi look the same.
  static constexpr std::array<Rgb, 5> kTwilight{{{0.886, 0.851, 0.887},
                                                  {0.370, 0.443, 0.720},
                                                  {0.185, 0.079, 0.212},
                                                  {0.708, 0.314, 0.256},
                                                  {0.886, 0.851, 0.887}}};
  switch (map) {
    case Colormap::kViridis:
      return lerp_table(kViridis, t);
    case Colormap::kTwilight:
      return lerp_table(kTwilight, t);
    case Colormap::kGray:
      break;
  }
  const double g = std::clamp(t, 0.0, 1.0);
  return {g, g, g};
}

}  // namespace

RgbImage render_heatmap(std::span<const double> values, std::size_t rows, std::size_t cols, double lo,
                        double hi, Colormap map, std::size_t scale) {
  if (values.size() != rows * cols) throw ArgumentError("render_heatmap: size mismatch");
  if (scale == 0) throw ArgumentError("render_heatmap: scale must be positive");
  RgbImage img;
  img.width = cols * scale;
  img.height = rows * scale;
  img.pixels.resize(img.width * img.height * 3);
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      const double v = values[(r / scale) * cols + c / scale];
      const Rgb rgb = std::isfinite(v) ? color(map, (v - lo) / span) : Rgb{1.0, 0.0, 1.0};
      for (int ch = 0; ch < 3; ++ch) {
        img.pixels[(r * img.width + c) * 3 + ch] = static_cast<std::uint8_t>(std::lround(255.0 * rgb[ch]));
      }
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw DataError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ResourceError("libpng: cannot allocate writer");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng: failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < image.height; ++r) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + r * image.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_field_images(const std::filesystem::path& stem, const FieldGrid& field, std::size_t k,
                        const std::vector<std::uint8_t>* mask) {
  if (k >= field.num_freqs()) throw ArgumentError("write_field_images: frequency index out of range");
  const std::size_t rows = field.height;
  const std::size_t cols = field.width;
  std::vector<double> mag(rows * cols), phase(rows * cols);
  double peak = 0.0;
  for (std::size_t w = 0; w < cols; ++w) {
    for (std::size_t h = 0; h < rows; ++h) peak = std::max(peak, std::abs(field.at(w, h, k)));
  }
  for (std::size_t w = 0; w < cols; ++w) {
    for (std::size_t h = 0; h < rows; ++h) {
      const std::size_t cell = (rows - 1 - h) * cols + w;
      const double a = std::abs(field.at(w, h, k));
      mag[cell] = peak > 0.0 ? 20.0 * std::log10(std::max(a / peak, 1e-6)) : -120.0;
      phase[cell] = std::arg(field.at(w, h, k));
    }
  }
  auto with_suffix = [&](const char* suffix) {
    auto p = stem;
    p += suffix;
    return p;
  };
  write_png(with_suffix("_magnitude.png"), render_heatmap(mag, rows, cols, -40.0, 0.0, Colormap::kViridis));
  write_png(with_suffix("_phase.png"), render_heatmap(phase, rows, cols, -M_PI, M_PI, Colormap::kTwilight));
  if (mask) {
    std::vector<double> m(rows * cols);
    for (std::size_t w = 0; w < cols; ++w) {
      for (std::size_t h = 0; h < rows; ++h) m[(rows - 1 - h) * cols + w] = (*mask)[w * rows + h] ? 1.0 : 0.0;
    }
    write_png(with_suffix("_mask.png"), render_heatmap(m, rows, cols, 0.0, 1.0, Colormap::kGray));
  }
}

}  // namespace rtfnet
