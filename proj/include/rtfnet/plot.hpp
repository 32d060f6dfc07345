#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rtfnet/eval.hpp"
#include "rtfnet/field_grid.hpp"

namespace rtfnet {

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

enum class Colormap { kViridis, kTwilight, kGray };

// values[row * cols + col] mapped onto [lo, hi]; each cell becomes a
// scale x scale block.
RgbImage render_heatmap(std::span<const double> values, std::size_t rows, std::size_t cols, double lo,
                        double hi, Colormap map, std::size_t scale = 8);

void write_png(const std::filesystem::path& path, const RgbImage& image);

// Magnitude in dB (relative to the field maximum at k), phase in radians,
// and the observation mask. Grid axis w runs left to right, h bottom to top.
void write_field_images(const std::filesystem::path& stem, const FieldGrid& field, std::size_t k,
                        const std::vector<std::uint8_t>* mask = nullptr);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

std::string render_svg(const LineChart& chart);

// One chart per (sweep, metric), one curve per (method, sweep key).
// Returns the written file paths.
std::vector<std::filesystem::path> write_metric_plots(const std::filesystem::path& dir,
                                                      const std::vector<MetricReport>& reports);

}  // namespace rtfnet
