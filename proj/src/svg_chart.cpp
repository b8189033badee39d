#include "commstab/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "commstab/io.hpp"

namespace commstab {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 520.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

double pick(const TrajectorySample& s, int idx) {
  switch (idx) {
    case 0: return s.state.d_dl;
    case 1: return s.state.d_dr;
    case 2: return s.state.d_sl;
    default: return s.state.d_sr;
  }
}

// limited precision keeps the file small; the CSV is the exact record
std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string trajectory_svg(const Trajectory& traj) {
  const char* labels[4] = {"delta_dl", "delta_dr", "delta_sl", "delta_sr"};
  const char* colors[4] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  double t_min = 0.0, t_max = 1.0, v_min = 0.0, v_max = 0.0;
  if (!traj.samples.empty()) {
    t_min = traj.samples.front().state.t;
    t_max = std::max(traj.samples.back().state.t, t_min + 1e-12);
    for (const TrajectorySample& s : traj.samples) {
      for (int k = 0; k < 4; ++k) {
        v_min = std::min(v_min, pick(s, k));
        v_max = std::max(v_max, pick(s, k));
      }
    }
  }
  if (v_max - v_min < 1e-15) v_max = v_min + 1e-15;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double t) { return kMarginLeft + (t - t_min) / (t_max - t_min) * plot_w; };
  auto sy = [&](double v) { return kMarginTop + (v_max - v) / (v_max - v_min) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) + "\" height=\"" +
         coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  const double x0 = kMarginLeft, x1 = kMarginLeft + plot_w;
  const double y0 = kMarginTop, y1 = kMarginTop + plot_h;
  svg += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y1) + "\" x2=\"" + coord(x1) + "\" y2=\"" +
         coord(y1) + "\" stroke=\"#333\"/>\n";
  svg += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(x0) + "\" y2=\"" +
         coord(y1) + "\" stroke=\"#333\"/>\n";
  if (v_min < 0.0 && v_max > 0.0) {
    svg += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(sy(0.0)) + "\" x2=\"" + coord(x1) +
           "\" y2=\"" + coord(sy(0.0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
  }

  auto text = [&](double x, double y, const std::string& s, const char* anchor) {
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"" +
           anchor + "\">" + s + "</text>\n";
  };
  text(x0, y1 + 20.0, "t=" + format_double(t_min), "middle");
  text(x1, y1 + 20.0, "t=" + format_double(t_max), "middle");
  text(x0 - 8.0, y1 + 4.0, format_double(v_min), "end");
  text(x0 - 8.0, y0 + 4.0, format_double(v_max), "end");

  for (int k = 0; k < 4; ++k) {
    std::string points;
    for (const TrajectorySample& s : traj.samples) {
      points += coord(sx(s.state.t)) + "," + coord(sy(pick(s, k))) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += colors[k];
    svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = kMarginTop + 18.0 * (k + 1);
    svg += "<line x1=\"" + coord(x1 + 12.0) + "\" y1=\"" + coord(ly - 4.0) + "\" x2=\"" +
           coord(x1 + 36.0) + "\" y2=\"" + coord(ly - 4.0) + "\" stroke=\"";
    svg += colors[k];
    svg += "\" stroke-width=\"2\"/>\n";
    text(x1 + 42.0, ly, labels[k], "start");
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace commstab
