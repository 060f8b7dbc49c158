#pragma once

#include <string>
#include <vector>

#include "lpbf/geometry.hpp"

namespace lpbf {

// One stop of the laser. The laser flag describes the segment arriving at
// this position; the first move of a path carries laser = false.
struct Move {
  int point = -1;  // sample-grid index, -1 for off-grid positions
  Vec2 pos;        // mm
  bool laser = false;
};

struct Toolpath {
  double hatch = 0.0;  // mm
  std::string generator;
  std::vector<Move> moves;

  double length() const;
  double laser_length() const;
  int void_move_count() const;
  std::vector<Segment> segments() const;

  std::string to_json() const;
  static Toolpath from_json(const std::string& text);
  void save(const std::string& path) const;
  static Toolpath load(const std::string& path);
};

struct SensitiveRegions {
  int count = 0;
  std::vector<int> move_indices;  // later turn of each pair
  std::vector<Vec2> locations;
};

// Pairs of successive laser-on turning angles below 90 degrees separated by
// at most coeff * hatch of path length.
SensitiveRegions detect_sensitive_regions(const Toolpath& path,
                                          double coeff = 3.0);

}  // namespace lpbf
