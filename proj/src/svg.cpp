#include "monoproj/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "monoproj/errors.hpp"
#include "monoproj/grid_io.hpp"

namespace monoproj {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginL = 64;
constexpr int kMarginR = 24;
constexpr int kMarginT = 40;
constexpr int kMarginB = 48;

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49",
                          "#574ae2", "#8d5a97"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Round tick label; trims trailing zeros.
std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string ecdf_svg(const std::string& title, const std::string& x_label,
                     const std::vector<EcdfSeries>& series) {
  if (series.empty()) throw InputError("ecdf_svg: no series");
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& [label, sample] : series) {
    if (sample.empty()) throw InputError("ecdf_svg: empty sample in series '" + label + "'");
    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    if (first) {
      lo = *mn;
      hi = *mx;
      first = false;
    } else {
      lo = std::min(lo, *mn);
      hi = std::max(hi, *mx);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.03 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  const auto sx = [&](double x) { return kMarginL + (x - lo) / (hi - lo) * plot_w; };
  const auto sy = [&](double p) { return kMarginT + (1.0 - p) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
         std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2.0) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

  // frame + ticks
  out += "<rect x=\"" + num(kMarginL) + "\" y=\"" + num(kMarginT) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double p = i / 4.0;
    out += "<line x1=\"" + num(kMarginL - 4) + "\" y1=\"" + num(sy(p)) + "\" x2=\"" +
           num(kMarginL) + "\" y2=\"" + num(sy(p)) + "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(kMarginL - 8) + "\" y=\"" + num(sy(p) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           tick_label(p) + "</text>\n";
    const double x = lo + p * (hi - lo);
    out += "<line x1=\"" + num(sx(x)) + "\" y1=\"" + num(kMarginT + plot_h) +
           "\" x2=\"" + num(sx(x)) + "\" y2=\"" + num(kMarginT + plot_h + 4) +
           "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(sx(x)) + "\" y=\"" + num(kMarginT + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           tick_label(x) + "</text>\n";
  }
  out += "<text x=\"" + num(kMarginL + plot_w / 2.0) + "\" y=\"" +
         num(kHeight - 10.0) + "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">" + x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(kMarginT + plot_h / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + num(kMarginT + plot_h / 2.0) +
         ")\">ECDF</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<double> sample = series[s].second;
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    std::string pts = num(sx(sample[0])) + "," + num(sy(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double p0 = static_cast<double>(i) / n;
      const double p1 = static_cast<double>(i + 1) / n;
      pts += " " + num(sx(sample[i])) + "," + num(sy(p0));
      pts += " " + num(sx(sample[i])) + "," + num(sy(p1));
    }
    pts += " " + num(sx(hi)) + "," + num(sy(1.0));
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.6\"/>\n";
    out += "<rect x=\"" + num(kMarginL + 10) + "\" y=\"" +
           num(kMarginT + 10 + 18.0 * s) + "\" width=\"14\" height=\"4\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"" + num(kMarginL + 30) + "\" y=\"" +
           num(kMarginT + 16 + 18.0 * s) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + series[s].first +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_ecdf_svg(const std::string& path, const std::string& title,
                    const std::string& x_label,
                    const std::vector<EcdfSeries>& series) {
  atomic_write_file(path, ecdf_svg(title, x_label, series));
}

}  // namespace monoproj
