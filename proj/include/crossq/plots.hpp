#pragma once

// Self-contained SVG emission for the two standard figures: Q-table norm
// versus episode, and position-versus-time overlays of RL and baseline
// trajectories.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "crossq/baseline.hpp"
#include "crossq/harness.hpp"
#include "crossq/io.hpp"

namespace crossq {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Writes a minimal line chart. Empty series lists still produce a valid
/// (axes-only) document.
inline void write_svg_chart(const std::string& path, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series) {
  const double W = 860, H = 520;
  const double ml = 70, mr = 170, mt = 45, mb = 55;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x_lo = x_hi = x;
        y_lo = y_hi = y;
        any = true;
      }
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;

  auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y_lo) / (y_hi - y_lo) * (H - mt - mb); };

  std::string svg;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                "height=\"%g\" viewBox=\"0 0 %g %g\">\n"
                "<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n",
                W, H, W, H, W, H);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%g\" y=\"25\" font-family=\"sans-serif\" "
                "font-size=\"16\" text-anchor=\"middle\">%s</text>\n",
                (ml + W - mr) / 2, title.c_str());
  svg += buf;

  // axes and ticks
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb, ml, mt, ml, H - mb);
  svg += buf;
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 5;
    const double yv = y_lo + (y_hi - y_lo) * i / 5;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\"/>\n"
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"middle\">%.4g</text>\n",
                  px(xv), H - mb, px(xv), H - mb + 5, px(xv), H - mb + 18, xv);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\"/>\n"
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                  ml - 5, py(yv), ml, py(yv), ml - 8, py(yv) + 4, yv);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\">%s</text>\n"
                "<text x=\"18\" y=\"%g\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 18 %g)\">%s</text>\n",
                (ml + W - mr) / 2, H - 12, xlabel.c_str(), (mt + H - mb) / 2,
                (mt + H - mb) / 2, ylabel.c_str());
  svg += buf;

  // series polylines and legend
  double legend_y = mt + 10;
  for (const auto& s : series) {
    if (!s.points.empty()) {
      std::string pts;
      for (const auto& [x, y] : s.points) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
        pts += buf;
      }
      std::snprintf(buf, sizeof(buf),
                    "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                    "stroke-width=\"1.6\"%s/>\n",
                    pts.c_str(), s.color.c_str(),
                    s.dashed ? " stroke-dasharray=\"6 4\"" : "");
      svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
                  "stroke-width=\"2\"%s/>\n"
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" "
                  "font-size=\"12\">%s</text>\n",
                  W - mr + 12, legend_y, W - mr + 38, legend_y, s.color.c_str(),
                  s.dashed ? " stroke-dasharray=\"6 4\"" : "", W - mr + 44,
                  legend_y + 4, s.label.c_str());
    svg += buf;
    legend_y += 18;
  }
  svg += "</svg>\n";
  write_text_file(path, svg);
}

inline const char* series_color(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[i % 8];
}

/// Per-vehicle Q-norm curves plus their average, one point per 100 episodes.
inline void write_qnorm_plot(const std::vector<NormRecord>& history,
                             const std::string& path) {
  std::vector<PlotSeries> series;
  if (!history.empty()) {
    const std::size_t n = history.front().per_vehicle.size();
    for (std::size_t i = 0; i < n; ++i) {
      PlotSeries s;
      s.label = "CAV " + std::to_string(i + 1);
      s.color = series_color(i);
      for (const auto& rec : history)
        s.points.push_back({static_cast<double>(rec.episode), rec.per_vehicle[i]});
      series.push_back(std::move(s));
    }
    PlotSeries avg;
    avg.label = "average";
    avg.color = "#000000";
    avg.dashed = true;
    for (const auto& rec : history)
      avg.points.push_back({static_cast<double>(rec.episode), rec.average});
    series.push_back(std::move(avg));
  }
  write_svg_chart(path, "Q-table norm", "episode", "Cartesian norm", series);
}

/// Position-versus-time overlay: solid RL trajectories against dashed
/// baseline ones for the same episode.
inline void write_position_plot(const std::vector<StepRecord>& rl_trace,
                                const BaselineResult* baseline,
                                const std::string& path) {
  std::vector<PlotSeries> series;
  std::vector<int> ids;
  for (const auto& r : rl_trace)
    if (std::find(ids.begin(), ids.end(), r.vehicle) == ids.end())
      ids.push_back(r.vehicle);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    PlotSeries s;
    s.label = "CAV " + std::to_string(ids[i]);
    s.color = series_color(i);
    for (const auto& r : rl_trace)
      if (r.vehicle == ids[i]) s.points.push_back({r.t, r.p});
    series.push_back(std::move(s));
  }
  if (baseline) {
    for (std::size_t i = 0; i < baseline->trajectories.size(); ++i) {
      const auto& tr = baseline->trajectories[i];
      PlotSeries s;
      s.label = "CAV " + std::to_string(tr.id) + " (optimal)";
      s.color = series_color(i);
      s.dashed = true;
      for (const auto& smp : tr.samples) s.points.push_back({smp.t, smp.p});
      series.push_back(std::move(s));
    }
  }
  write_svg_chart(path, "Position trajectories", "time [s]", "position [m]", series);
}

}  // namespace crossq
