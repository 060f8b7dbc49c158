#include "lpbf/pathplan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lpbf {

namespace {

void append_fixed4(std::string& out, double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 4);
  out.append(buf, res.ptr);
}

Polygon cleaned_ring(const Polygon& poly) {
  Polygon out;
  for (const Vec2& p : poly) {
    if (out.empty() || distance(out.back(), p) > 1e-12) out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= 1e-12)
    out.pop_back();
  return out;
}

}  // namespace

std::string GCodeProgram::to_text() const {
  std::string out = "G21\nG90\n";
  for (const GCodeWord& w : words) {
    out += w.rapid ? "G0 X" : "G1 X";
    append_fixed4(out, w.pos.x);
    out += " Y";
    append_fixed4(out, w.pos.y);
    out += "\n";
  }
  return out;
}

GCodeProgram GCodeProgram::parse(const std::string& text) {
  GCodeProgram prog;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "G21" || line == "G90") continue;
    bool rapid;
    if (line.rfind("G0 ", 0) == 0) rapid = true;
    else if (line.rfind("G1 ", 0) == 0) rapid = false;
    else throw std::runtime_error("unrecognized g-code line: " + line);
    std::size_t xi = line.find('X');
    std::size_t yi = line.find('Y');
    if (xi == std::string::npos || yi == std::string::npos)
      throw std::runtime_error("g-code line without X/Y: " + line);
    GCodeWord w;
    w.rapid = rapid;
    auto parse_num = [&](std::size_t start, double& v) {
      std::size_t end = line.find(' ', start);
      if (end == std::string::npos) end = line.size();
      auto res = std::from_chars(line.data() + start, line.data() + end, v);
      if (res.ec != std::errc{})
        throw std::runtime_error("bad coordinate in g-code line: " + line);
    };
    parse_num(xi + 1, w.pos.x);
    parse_num(yi + 1, w.pos.y);
    prog.words.push_back(w);
  }
  return prog;
}

Toolpath generate_voronoi_patterns(const Polygon& island,
                                   const std::vector<Vec2>& seeds,
                                   const QNetwork& policy, double hatch,
                                   const EnvConfig& env_cfg,
                                   std::vector<std::string>* warnings) {
  VoronoiPartition part = voronoi_partition(island, seeds);

  struct CellPath {
    Toolpath path;
    Vec2 mean;
  };
  std::vector<CellPath> cells;
  for (std::size_t ci = 0; ci < part.cells.size(); ++ci) {
    Polygon ring = cleaned_ring(part.cells[ci]);
    if (ring.size() < 3 || polygon_area(ring) < 1e-12) continue;
    SampleGrid grid;
    try {
      grid = sample_uniform(PolygonDomain::from_vertices(ring), hatch);
    } catch (const std::exception& e) {
      if (warnings)
        warnings->push_back("cell " + std::to_string(ci + 1) +
                            " skipped: " + e.what());
      continue;
    }
    Vec2 mean{0.0, 0.0};
    for (const Vec2& p : grid.points) mean = mean + p;
    mean = mean * (1.0 / grid.size());
    ScanEnv env(std::move(grid), env_cfg);
    CellPath cp;
    cp.path = greedy_rollout(policy, env);
    cp.mean = mean;
    cells.push_back(std::move(cp));
  }

  std::sort(cells.begin(), cells.end(), [](const CellPath& a, const CellPath& b) {
    double ka = a.mean.x + a.mean.y, kb = b.mean.x + b.mean.y;
    if (ka != kb) return ka < kb;
    return a.mean.x < b.mean.x;
  });

  Toolpath merged;
  merged.hatch = hatch;
  merged.generator = "dqn-voronoi";
  for (const CellPath& cp : cells) {
    for (std::size_t i = 0; i < cp.path.moves.size(); ++i) {
      Move m = cp.path.moves[i];
      m.point = -1;  // indices are cell-local, positions stand alone
      if (i == 0) m.laser = false;
      merged.moves.push_back(m);
    }
  }
  return merged;
}

std::vector<int> plan_island_sequence(const IslandGrid& islands, Vec2 corner,
                                      double lambda) {
  const int n = static_cast<int>(islands.islands.size());
  if (n == 0) throw std::invalid_argument("no islands to sequence");
  std::vector<int> order;
  std::vector<std::uint8_t> used(n, 0);

  int first = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double d = distance(islands.centroids[i], corner);
    if (d < best_d - 1e-12) {
      best_d = d;
      first = i;
    }
  }
  order.push_back(first);
  used[first] = 1;

  while (static_cast<int>(order.size()) < n) {
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      double score = 0.0;
      for (std::size_t k = 0; k < order.size(); ++k) {
        int age = static_cast<int>(order.size() - 1 - k);
        double d = std::max(distance(islands.centroids[i],
                                     islands.centroids[order[k]]),
                            1e-12);
        score += std::pow(lambda, age) / d;
      }
      if (score < best_score - 1e-15) {
        best_score = score;
        best = i;
      }
    }
    order.push_back(best);
    used[best] = 1;
  }
  return order;
}

Toolpath insert_void_moves(Toolpath path, double threshold) {
  for (std::size_t i = 1; i < path.moves.size(); ++i) {
    double d = distance(path.moves[i - 1].pos, path.moves[i].pos);
    if (d > threshold * (1.0 + 1e-9)) path.moves[i].laser = false;
  }
  return path;
}

GCodeProgram finetune_gcode(const Toolpath& path, double threshold) {
  double t = threshold > 0.0 ? threshold : std::sqrt(2.0) * path.hatch;
  const double t_tol = t * (1.0 + 1e-9);
  const auto& mv = path.moves;
  const std::size_t n = mv.size();
  GCodeProgram prog;
  if (n == 0) return prog;

  std::vector<double> gap(n + 1, std::numeric_limits<double>::infinity());
  for (std::size_t i = 1; i < n; ++i)
    gap[i] = distance(mv[i - 1].pos, mv[i].pos);  // gap[i]: between i-1 and i

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    bool prev_far = gap[i] > t_tol;      // gap[0] = inf covers the first point
    bool next_far = gap[i + 1] > t_tol;  // gap[n] = inf covers the last point
    if (!(prev_far && next_far)) kept.push_back(i);
  }
  if (kept.empty()) return prog;

  prog.words.push_back({true, mv[kept[0]].pos});
  for (std::size_t k = 1; k < kept.size(); ++k) {
    std::size_t a = kept[k - 1], b = kept[k];
    bool all_laser = true;
    for (std::size_t i = a + 1; i <= b; ++i) all_laser &= mv[i].laser;
    double d = distance(mv[a].pos, mv[b].pos);
    prog.words.push_back({!(all_laser && d <= t_tol), mv[b].pos});
  }
  return prog;
}

void export_gcode(const GCodeProgram& program, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write g-code file: " + path);
  out << program.to_text();
}

IslandPlan plan_voronoi_islands(const PolygonDomain& domain,
                                double island_size, const QNetwork& policy,
                                double hatch, const EnvConfig& env_cfg,
                                int random_seeds_per_island, Rng& rng,
                                double lambda) {
  IslandPlan plan;
  plan.islands = island_partition(domain, island_size);
  plan.order = plan_island_sequence(plan.islands, domain.bbox().min, lambda);
  plan.island_paths.resize(plan.islands.islands.size());
  for (std::size_t i = 0; i < plan.islands.islands.size(); ++i) {
    std::vector<Vec2> seeds = default_voronoi_seeds(
        plan.islands.islands[i], random_seeds_per_island, rng);
    plan.island_paths[i] =
        generate_voronoi_patterns(plan.islands.islands[i], seeds, policy,
                                  hatch, env_cfg, &plan.warnings);
  }
  plan.merged.hatch = hatch;
  plan.merged.generator = "dqn-voronoi-island";
  for (int idx : plan.order) {
    const Toolpath& p = plan.island_paths[idx];
    for (std::size_t i = 0; i < p.moves.size(); ++i) {
      Move m = p.moves[i];
      if (i == 0) m.laser = false;
      plan.merged.moves.push_back(m);
    }
  }
  return plan;
}

}  // namespace lpbf
