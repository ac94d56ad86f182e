#ifndef RTCC_SVG_PLOT_H_
#define RTCC_SVG_PLOT_H_

#include <string>
#include <vector>

namespace rtcc {

// Minimal self-contained SVG emission: no external plotting dependency, the
// output files open in any browser.

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

void WriteLinePlot(const std::string& path, const PlotAxes& axes,
                   const std::vector<PlotSeries>& series);

void WriteScatterPlot(const std::string& path, const PlotAxes& axes,
                      const std::vector<PlotSeries>& series);

struct BarGroup {
  std::string label;            // category (e.g. controller name)
  std::vector<double> values;   // one per series
};

void WriteBarPlot(const std::string& path, const PlotAxes& axes,
                  const std::vector<std::string>& series_names,
                  const std::vector<BarGroup>& groups);

// Empirical CDF of the samples as a line plot.
void WriteCdfPlot(const std::string& path, const PlotAxes& axes,
                  const std::vector<std::pair<std::string, std::vector<double>>>&
                      sample_sets);

}  // namespace rtcc

#endif  // RTCC_SVG_PLOT_H_
