#include "lpbf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace lpbf {

namespace {

constexpr double kW = 640.0, kH = 480.0, kMargin = 56.0;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::ofstream open_svg(const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write svg: " + file);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

struct Scale {
  double x0, x1, y0, y1;  // data range
  double px(double x) const {
    return kMargin + (x - x0) / (x1 - x0) * (kW - 2 * kMargin);
  }
  double py(double y) const {
    return kH - kMargin - (y - y0) / (y1 - y0) * (kH - 2 * kMargin);
  }
};

void draw_axes(std::ofstream& out, const Scale& s, const std::string& x_label,
               const std::string& y_label) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\""
      << kW - kMargin << "\" y2=\"" << kH - kMargin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
      << kMargin << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = s.x0 + (s.x1 - s.x0) * i / 4.0;
    double fy = s.y0 + (s.y1 - s.y0) * i / 4.0;
    out << "<text x=\"" << s.px(fx) << "\" y=\"" << kH - kMargin + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx)
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << s.py(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kH / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "16 "
      << kH / 2 << ")\">" << y_label << "</text>\n";
}

void polyline(std::ofstream& out, const std::vector<std::pair<double, double>>& pts,
              const std::string& color, bool dashed, double width = 1.5) {
  if (pts.empty()) return;
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << width << "\"";
  if (dashed) out << " stroke-dasharray=\"6 4\"";
  out << " points=\"";
  for (const auto& [x, y] : pts) out << fmt(x) << "," << fmt(y) << " ";
  out << "\"/>\n";
}

}  // namespace

void svg_toolpath(const Toolpath& path, const std::string& file) {
  std::ofstream out = open_svg(file);
  if (!path.moves.empty()) {
    BoundingBox bb{path.moves[0].pos, path.moves[0].pos};
    for (const Move& m : path.moves) {
      bb.min.x = std::min(bb.min.x, m.pos.x);
      bb.min.y = std::min(bb.min.y, m.pos.y);
      bb.max.x = std::max(bb.max.x, m.pos.x);
      bb.max.y = std::max(bb.max.y, m.pos.y);
    }
    double span = std::max({bb.width(), bb.height(), 1e-9});
    Scale s{bb.min.x, bb.min.x + span, bb.min.y, bb.min.y + span};
    for (std::size_t i = 1; i < path.moves.size(); ++i) {
      const Move& a = path.moves[i - 1];
      const Move& b = path.moves[i];
      out << "<line x1=\"" << fmt(s.px(a.pos.x)) << "\" y1=\""
          << fmt(s.py(a.pos.y)) << "\" x2=\"" << fmt(s.px(b.pos.x))
          << "\" y2=\"" << fmt(s.py(b.pos.y)) << "\" stroke=\""
          << (b.laser ? "#d62728" : "#7f7f7f") << "\" stroke-width=\"1.2\"";
      if (!b.laser) out << " stroke-dasharray=\"4 3\"";
      out << "/>\n";
    }
    out << "<circle cx=\"" << fmt(s.px(path.moves[0].pos.x)) << "\" cy=\""
        << fmt(s.py(path.moves[0].pos.y)) << "\" r=\"3\" fill=\"black\"/>\n";
  }
  out << "<text x=\"" << kW / 2
      << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">"
      << path.generator << "</text>\n</svg>\n";
}

void svg_line_chart(const std::vector<Series>& series, const std::string& title,
                    const std::string& x_label, const std::string& file) {
  std::ofstream out = open_svg(file);
  std::size_t n = 0;
  for (const Series& s : series) n = std::max(n, s.values.size());
  Scale frame{0.0, std::max<double>(1.0, static_cast<double>(n - 1)), 0.0, 1.0};
  draw_axes(out, frame, x_label, "normalized");
  double ly = kMargin;
  for (const Series& s : series) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i)
      pts.emplace_back(frame.px(static_cast<double>(i)),
                       frame.py((s.values[i] - lo) / (hi - lo)));
    polyline(out, pts, s.color, false, 1.2);
    out << "<text x=\"" << kW - kMargin << "\" y=\"" << ly
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << s.color
        << "\">" << s.name << " [" << fmt(lo) << ", " << fmt(hi)
        << "]</text>\n";
    ly += 14.0;
  }
  out << "<text x=\"" << kW / 2
      << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << title
      << "</text>\n</svg>\n";
}

void svg_depth_overlay(const std::vector<DepthOverlaySeries>& series,
                       const std::string& file) {
  std::ofstream out = open_svg(file);
  std::size_t n = 1;
  double dmax = 1.0;
  for (const auto& s : series) {
    n = std::max(n, s.depths_um.size());
    for (double v : s.depths_um) dmax = std::max(dmax, v);
    dmax = std::max(dmax, s.peak_um);
  }
  Scale sc{0.0, static_cast<double>(n - 1), 0.0, dmax * 1.05};
  draw_axes(out, sc, "emission step", "melt depth (um)");
  double ly = kMargin;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(s.depths_um.size());
    for (std::size_t i = 0; i < s.depths_um.size(); ++i)
      pts.emplace_back(sc.px(static_cast<double>(i)), sc.py(s.depths_um[i]));
    polyline(out, pts, s.color, false, 1.0);
    // dashed average line
    polyline(out,
             {{sc.px(0.0), sc.py(s.avg_um)},
              {sc.px(static_cast<double>(n - 1)), sc.py(s.avg_um)}},
             s.color, true, 1.0);
    // inverse-triangle marker at the peak
    std::size_t peak_i = 0;
    for (std::size_t i = 0; i < s.depths_um.size(); ++i)
      if (s.depths_um[i] >= s.depths_um[peak_i]) peak_i = i;
    double cx = sc.px(static_cast<double>(peak_i));
    double cy = sc.py(s.peak_um);
    out << "<polygon points=\"" << fmt(cx - 5) << "," << fmt(cy - 8) << " "
        << fmt(cx + 5) << "," << fmt(cy - 8) << " " << fmt(cx) << ","
        << fmt(cy) << "\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << kW - kMargin << "\" y=\"" << ly
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << s.color
        << "\">" << s.name << " avg " << fmt(s.avg_um) << " peak "
        << fmt(s.peak_um) << "</text>\n";
    ly += 14.0;
  }
  out << "<text x=\"" << kW / 2
      << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">melt pool depth "
         "comparison</text>\n</svg>\n";
}

void svg_angle_depth(const std::vector<std::pair<double, double>>& pairs,
                     const std::string& file) {
  std::ofstream out = open_svg(file);
  double dmax = 1.0;
  for (const auto& [a, d] : pairs) dmax = std::max(dmax, d);
  Scale sc{0.0, 180.0, 0.0, dmax * 1.1};
  draw_axes(out, sc, "turning angle (deg)", "max melt depth (um)");
  std::vector<std::pair<double, double>> pts;
  std::vector<std::pair<double, double>> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  pts.reserve(sorted.size());
  for (const auto& [a, d] : sorted) pts.emplace_back(sc.px(a), sc.py(d));
  polyline(out, pts, "#1f77b4", false, 1.4);
  for (const auto& [x, y] : pts)
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  out << "<text x=\"" << kW / 2
      << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">turning angle "
         "vs melt depth</text>\n</svg>\n";
}

}  // namespace lpbf
