#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "rtfnet/errors.hpp"
#include "rtfnet/plot.hpp"

namespace rtfnet {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step from {1, 2, 5} x 10^n giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string render_svg(const LineChart& chart) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 170, kTop = 40, kBottom = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw ArgumentError("plot series " + s.label + ": x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 1, y1 += 1;
  const double ystep = nice_step(y1 - y0, 6);
  y0 = std::floor(y0 / ystep) * ystep;
  y1 = std::ceil(y1 / ystep) * ystep;
  const double xstep = nice_step(x1 - x0, 6);

  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(chart.title) + "</text>\n";
  for (double y = y0; y <= y1 + 1e-9 * ystep; y += ystep) {
    svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(py(y)) + "\" y2=\"" +
           num(py(y)) + "\" stroke=\"#ddd\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", std::abs(y) < 1e-9 * ystep ? 0.0 : y);
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + label +
           "</text>\n";
  }
  for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + 1e-9 * xstep; x += xstep) {
    svg += "<line x1=\"" + num(px(x)) + "\" x2=\"" + num(px(x)) + "\" y1=\"" + num(kTop) + "\" y2=\"" +
           num(kTop + ph) + "\" stroke=\"#eee\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", x);
    svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" + label +
           "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kH - 12) + "\" text-anchor=\"middle\">" +
         escape(chart.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(chart.y_label) + "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* col = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (std::size_t j = 0; j < s.x.size(); ++j) pts += num(px(s.x[j])) + "," + num(py(s.y[j])) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    svg += "<line x1=\"" + num(kLeft + pw + 12) + "\" x2=\"" + num(kLeft + pw + 36) + "\" y1=\"" + num(ly - 4) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kLeft + pw + 42) + "\" y=\"" + num(ly) + "\">" + escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> write_metric_plots(const std::filesystem::path& dir,
                                                      const std::vector<MetricReport>& reports) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const MetricReport*>> by_sweep;
  for (const auto& r : reports) by_sweep[r.sweep].push_back(&r);
  std::vector<std::filesystem::path> written;
  for (const auto& [sweep, list] : by_sweep) {
    for (int metric = 0; metric < 2; ++metric) {
      LineChart chart;
      const char* metric_name = metric == 0 ? "nmse_complex" : "nmse_abs";
      chart.title = std::string(metric == 0 ? "NMSE (complex)" : "NMSE (magnitude)") + ", " + sweep + " sweep";
      chart.x_label = "Frequency [Hz]";
      chart.y_label = "NMSE [dB]";
      for (const MetricReport* r : list) {
        PlotSeries s;
        char key[32];
        if (sweep == "t60") {
          std::snprintf(key, sizeof key, "T60=%gs", r->sweep_key);
        } else if (sweep == "mics") {
          std::snprintf(key, sizeof key, "m=%g", r->sweep_key);
        } else {
          std::snprintf(key, sizeof key, "%g", r->sweep_key);
        }
        s.label = r->method + " " + key;
        s.x = r->freqs;
        s.y = metric == 0 ? r->per_freq_nmse_complex : r->per_freq_nmse_abs;
        chart.series.push_back(std::move(s));
      }
      const auto path = dir / (sweep + "_" + metric_name + ".svg");
      write_text_file(path, render_svg(chart));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace rtfnet
