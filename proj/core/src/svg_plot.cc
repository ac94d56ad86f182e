#include "rtcc/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rtcc {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Bounds {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void Add(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  void Finish() {
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; }
    if (!std::isfinite(ymin)) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
  }
  double X(double x) const {
    return kMarginL + (x - xmin) / (xmax - xmin) * (kWidth - kMarginL - kMarginR);
  }
  double Y(double y) const {
    return kHeight - kMarginB -
           (y - ymin) / (ymax - ymin) * (kHeight - kMarginT - kMarginB);
  }
};

class Svg {
 public:
  explicit Svg(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write plot: " + path);
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
         << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  ~Svg() { out_ << "</svg>\n"; }

  void Frame(const PlotAxes& axes, const Bounds& b) {
    out_ << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
         << kWidth - kMarginL - kMarginR << "\" height=\""
         << kHeight - kMarginT - kMarginB
         << "\" fill=\"none\" stroke=\"#333\"/>\n";
    Text(kWidth / 2, 22, axes.title, 15, "middle");
    Text(kWidth / 2, kHeight - 12, axes.x_label, 12, "middle");
    out_ << "<text x=\"16\" y=\"" << kHeight / 2
         << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
         << kHeight / 2 << ")\">" << axes.y_label << "</text>\n";
    // Axis tick labels at the corners of the data range.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", b.xmin);
    Text(kMarginL, kHeight - kMarginB + 16, buf, 10, "middle");
    std::snprintf(buf, sizeof(buf), "%.3g", b.xmax);
    Text(kWidth - kMarginR, kHeight - kMarginB + 16, buf, 10, "middle");
    std::snprintf(buf, sizeof(buf), "%.3g", b.ymin);
    Text(kMarginL - 6, kHeight - kMarginB, buf, 10, "end");
    std::snprintf(buf, sizeof(buf), "%.3g", b.ymax);
    Text(kMarginL - 6, kMarginT + 10, buf, 10, "end");
  }

  void Text(double x, double y, const std::string& s, int size,
            const std::string& anchor) {
    out_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
         << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
  }

  void Polyline(const std::vector<std::pair<double, double>>& pts,
                const Bounds& b, const char* color) {
    out_ << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) out_ << b.X(x) << "," << b.Y(y) << " ";
    out_ << "\"/>\n";
  }

  void Dot(double x, double y, const char* color) {
    out_ << "<circle cx=\"" << x << "\" cy=\"" << y
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  void Rect(double x, double y, double w, double h, const char* color) {
    out_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
         << "\" height=\"" << h << "\" fill=\"" << color << "\"/>\n";
  }

  void Legend(const std::vector<std::string>& names) {
    double y = kMarginT + 14;
    for (size_t i = 0; i < names.size(); ++i) {
      const char* color = kColors[i % std::size(kColors)];
      Rect(kWidth - kMarginR - 150, y - 9, 10, 10, color);
      Text(kWidth - kMarginR - 136, y, names[i], 11, "start");
      y += 16;
    }
  }

  std::ofstream out_;
};

}  // namespace

void WriteLinePlot(const std::string& path, const PlotAxes& axes,
                   const std::vector<PlotSeries>& series) {
  Bounds b;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) b.Add(x, y);
  b.Finish();
  Svg svg(path);
  svg.Frame(axes, b);
  std::vector<std::string> names;
  for (size_t i = 0; i < series.size(); ++i) {
    svg.Polyline(series[i].points, b, kColors[i % std::size(kColors)]);
    names.push_back(series[i].name);
  }
  svg.Legend(names);
}

void WriteScatterPlot(const std::string& path, const PlotAxes& axes,
                      const std::vector<PlotSeries>& series) {
  Bounds b;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) b.Add(x, y);
  b.Finish();
  Svg svg(path);
  svg.Frame(axes, b);
  std::vector<std::string> names;
  for (size_t i = 0; i < series.size(); ++i) {
    for (const auto& [x, y] : series[i].points)
      svg.Dot(b.X(x), b.Y(y), kColors[i % std::size(kColors)]);
    names.push_back(series[i].name);
  }
  svg.Legend(names);
}

void WriteBarPlot(const std::string& path, const PlotAxes& axes,
                  const std::vector<std::string>& series_names,
                  const std::vector<BarGroup>& groups) {
  Bounds b;
  b.Add(0, 0);
  for (const auto& g : groups)
    for (double v : g.values) b.Add(0, v);
  b.xmin = 0;
  b.xmax = 1;
  b.Finish();

  Svg svg(path);
  svg.Frame(axes, b);
  if (groups.empty()) return;

  double plot_w = kWidth - kMarginL - kMarginR;
  double group_w = plot_w / groups.size();
  size_t per_group = std::max<size_t>(series_names.size(), 1);
  double bar_w = group_w * 0.8 / per_group;

  for (size_t g = 0; g < groups.size(); ++g) {
    double gx = kMarginL + g * group_w + group_w * 0.1;
    for (size_t s = 0; s < groups[g].values.size(); ++s) {
      double v = groups[g].values[s];
      double y0 = b.Y(std::max(0.0, v));
      double h = std::abs(b.Y(0) - b.Y(v));
      svg.Rect(gx + s * bar_w, y0, bar_w * 0.92, h,
               kColors[s % std::size(kColors)]);
    }
    svg.Text(kMarginL + g * group_w + group_w / 2, kHeight - kMarginB + 16,
             groups[g].label, 10, "middle");
  }
  svg.Legend(series_names);
}

void WriteCdfPlot(const std::string& path, const PlotAxes& axes,
                  const std::vector<std::pair<std::string, std::vector<double>>>&
                      sample_sets) {
  std::vector<PlotSeries> series;
  for (const auto& [name, samples] : sample_sets) {
    PlotSeries s;
    s.name = name;
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
      s.points.emplace_back(sorted[i],
                            static_cast<double>(i + 1) / sorted.size());
    series.push_back(std::move(s));
  }
  WriteLinePlot(path, axes, series);
}

}  // namespace rtcc
