#pragma once

#include <string>
#include <vector>

#include "lpbf/dqn.hpp"
#include "lpbf/geometry.hpp"
#include "lpbf/toolpath.hpp"

namespace lpbf {

struct GCodeWord {
  bool rapid = false;  // G0 when true, G1 feed otherwise
  Vec2 pos;            // mm
};

struct GCodeProgram {
  std::vector<GCodeWord> words;

  std::string to_text() const;  // G21/G90 header, 4-decimal coordinates
  static GCodeProgram parse(const std::string& text);
};

// Per-cell sampling and greedy rollout of the trained policy; cells ordered
// by ascending mean sample coordinate (x+y, then x) and joined by void moves.
// Cells too small to hold a sample point are skipped with a warning.
Toolpath generate_voronoi_patterns(const Polygon& island,
                                   const std::vector<Vec2>& seeds,
                                   const QNetwork& policy, double hatch,
                                   const EnvConfig& env_cfg,
                                   std::vector<std::string>* warnings = nullptr);

// Greedy inverse-distance order: start nearest to `corner`, then repeatedly
// take the island minimizing sum_j lambda^age_j / dist(i, j) over the
// already-visited islands.
std::vector<int> plan_island_sequence(const IslandGrid& islands, Vec2 corner,
                                      double lambda = 0.5);

// Laser off on every jump longer than `threshold`; existing void flags kept.
Toolpath insert_void_moves(Toolpath path, double threshold);

// Algorithm-2 fine-tune: a point whose gaps to both neighbors exceed the
// threshold is removed; any remaining jump over the threshold becomes a
// rapid move. The first surviving point becomes the initial positioning
// rapid. Default threshold sqrt(2) * hatch.
GCodeProgram finetune_gcode(const Toolpath& path, double threshold = -1.0);

void export_gcode(const GCodeProgram& program, const std::string& path);

struct IslandPlan {
  IslandGrid islands;
  std::vector<int> order;
  std::vector<Toolpath> island_paths;  // indexed like islands
  Toolpath merged;                     // concatenated in visit order
  std::vector<std::string> warnings;
};

IslandPlan plan_voronoi_islands(const PolygonDomain& domain,
                                double island_size, const QNetwork& policy,
                                double hatch, const EnvConfig& env_cfg,
                                int random_seeds_per_island, Rng& rng,
                                double lambda = 0.5);

}  // namespace lpbf
