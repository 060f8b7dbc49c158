#pragma once

#include <string>
#include <vector>

#include "lpbf/thermal.hpp"
#include "lpbf/toolpath.hpp"

namespace lpbf {

// Toolpath rendering: laser-on segments as one solid stroke, void moves dashed.
void svg_toolpath(const Toolpath& path, const std::string& file);

struct Series {
  std::string name;
  std::vector<double> values;  // indexed by x position
  std::string color = "#d62728";
};

// Line chart with a normalized y axis per series; legend carries the ranges.
void svg_line_chart(const std::vector<Series>& series, const std::string& title,
                    const std::string& x_label, const std::string& file);

struct DepthOverlaySeries {
  std::string name;
  std::vector<double> depths_um;
  std::string color;
  double avg_um = 0.0;
  double peak_um = 0.0;
};

// Depth traces with dashed average lines and inverse-triangle peak markers.
void svg_depth_overlay(const std::vector<DepthOverlaySeries>& series,
                       const std::string& file);

void svg_angle_depth(const std::vector<std::pair<double, double>>& pairs,
                     const std::string& file);

}  // namespace lpbf
