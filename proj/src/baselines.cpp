#include "lpbf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lpbf {

namespace {

// ordered point indices of one boustrophedon sweep; returns (index, laser)
// where laser=false marks a gap jump inside a sweep line
std::vector<std::pair<int, bool>> serpentine_order(const SampleGrid& grid,
                                                   const std::vector<int>& pts,
                                                   bool along_x) {
  // group by sweep line
  std::map<int, std::vector<int>> lines;  // line coord -> point indices
  for (int idx : pts) {
    int line = along_x ? grid.point_row[idx] : grid.point_col[idx];
    lines[line].push_back(idx);
  }
  std::vector<std::pair<int, bool>> out;
  out.reserve(pts.size());
  bool forward = true;
  for (auto& [line, members] : lines) {
    auto key = [&](int idx) {
      return along_x ? grid.point_col[idx] : grid.point_row[idx];
    };
    std::sort(members.begin(), members.end(),
              [&](int a, int b) { return key(a) < key(b); });
    if (!forward) std::reverse(members.begin(), members.end());
    for (std::size_t i = 0; i < members.size(); ++i) {
      bool contiguous =
          i > 0 && std::abs(key(members[i]) - key(members[i - 1])) == 1;
      // first point of a line connects to the previous line with laser on
      bool laser = i == 0 || contiguous;
      out.emplace_back(members[i], laser);
    }
    forward = !forward;
  }
  return out;
}

void append_order(Toolpath& path, const SampleGrid& grid,
                  const std::vector<std::pair<int, bool>>& order,
                  bool connect_laser) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool laser = order[i].second;
    if (path.moves.empty()) laser = false;             // start of the path
    else if (i == 0) laser = connect_laser;            // jump into this block
    path.moves.push_back({order[i].first, grid.points[order[i].first], laser});
  }
}

}  // namespace

Toolpath zigzag(const SampleGrid& grid, Axis direction) {
  if (grid.size() == 0) throw std::invalid_argument("zigzag on empty grid");
  std::vector<int> all(grid.size());
  for (int i = 0; i < grid.size(); ++i) all[i] = i;
  Toolpath path;
  path.hatch = grid.hatch;
  path.generator = "zigzag";
  append_order(path, grid, serpentine_order(grid, all, direction == Axis::X),
               true);
  return path;
}

Toolpath chessboard(const SampleGrid& grid, double island_size) {
  if (grid.size() == 0) throw std::invalid_argument("chessboard on empty grid");
  if (island_size < 2.0 * grid.hatch)
    throw std::invalid_argument("island size must be at least 2 hatches");

  const BoundingBox& bb = grid.domain_bbox;
  int nx = std::max(1, static_cast<int>(std::ceil(bb.width() / island_size - 1e-9)));
  int ny = std::max(1, static_cast<int>(std::ceil(bb.height() / island_size - 1e-9)));
  auto island_of = [&](const Vec2& p) {
    int ix = std::min(nx - 1, static_cast<int>(std::floor(
                                  (p.x - bb.min.x) / island_size + 1e-9)));
    int iy = std::min(ny - 1, static_cast<int>(std::floor(
                                  (p.y - bb.min.y) / island_size + 1e-9)));
    return std::pair{ix, iy};
  };

  std::vector<std::vector<int>> members(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < grid.size(); ++i) {
    auto [ix, iy] = island_of(grid.points[i]);
    members[static_cast<std::size_t>(iy) * nx + ix].push_back(i);
  }

  Toolpath path;
  path.hatch = grid.hatch;
  path.generator = "chessboard";
  for (int iy = 0; iy < ny; ++iy) {
    for (int k = 0; k < nx; ++k) {
      int ix = (iy % 2 == 0) ? k : nx - 1 - k;  // serpentine island order
      const auto& pts = members[static_cast<std::size_t>(iy) * nx + ix];
      if (pts.empty()) continue;
      bool along_x = (ix + iy) % 2 == 0;
      append_order(path, grid, serpentine_order(grid, pts, along_x), false);
    }
  }
  return path;
}

Toolpath atg_greedy(const SampleGrid& grid, const EnvConfig& cfg,
                    double smooth_threshold_deg, int start) {
  if (grid.size() == 0) throw std::invalid_argument("atg on empty grid");
  if (start < 0 || start >= grid.size())
    throw std::invalid_argument("start index out of range");

  std::vector<std::uint8_t> visited(grid.size(), 0);
  std::vector<std::uint8_t> cell_diag(
      static_cast<std::size_t>(std::max(grid.rows - 1, 1)) *
          std::max(grid.cols - 1, 1),
      0);
  TemperatureProxy proxy(cfg.proxy_window, cfg.proxy_sigma * grid.hatch,
                         cfg.proxy_tau * grid.hatch / cfg.velocity);

  auto diag_info = [&](int from, int to) {
    int r0 = grid.point_row[from], c0 = grid.point_col[from];
    int r1 = grid.point_row[to], c1 = grid.point_col[to];
    bool diag = std::abs(r1 - r0) == 1 && std::abs(c1 - c0) == 1;
    std::size_t cell = diag ? static_cast<std::size_t>(std::min(r0, r1)) *
                                      (grid.cols - 1) +
                                  std::min(c0, c1)
                            : 0;
    bool slash = diag && (r1 - r0) == (c1 - c0);
    return std::tuple{diag, cell, slash};
  };

  Toolpath path;
  path.hatch = grid.hatch;
  path.generator = "atg";
  int current = start;
  visited[current] = 1;
  int remaining = grid.size() - 1;
  path.moves.push_back({current, grid.points[current], false});
  std::optional<Vec2> prev_dir;
  double t = 0.0;

  while (remaining > 0) {
    const Vec2 cp = grid.points[current];
    const int cr = grid.point_row[current], cc = grid.point_col[current];
    struct Cand {
      int idx;
      double alpha, proxy_v;
    };
    std::vector<Cand> cands;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        int idx = grid.index_of_cell(cr + dr, cc + dc);
        if (idx < 0 || visited[idx]) continue;
        Vec2 dir = (grid.points[idx] - cp).normalized();
        double alpha = prev_dir ? turning_angle_deg(*prev_dir, dir) : 180.0;
        cands.push_back({idx, alpha, proxy.value(grid.points[idx], t)});
      }
    }

    int target = -1;
    bool laser = true;
    if (cands.empty()) {
      double best_d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < grid.size(); ++i) {
        if (visited[i]) continue;
        double d = distance(cp, grid.points[i]);
        if (d < best_d - 1e-12) {
          best_d = d;
          target = i;
        }
      }
      laser = false;
    } else {
      auto pick = [&](bool smooth_only) {
        int best = -1;
        double best_f = std::numeric_limits<double>::infinity();
        for (const Cand& c : cands) {
          if (smooth_only && c.alpha < smooth_threshold_deg - 1e-12) continue;
          if (c.proxy_v < best_f ||
              (c.proxy_v == best_f && best >= 0 && c.idx < best)) {
            best_f = c.proxy_v;
            best = c.idx;
          }
        }
        return best;
      };
      target = pick(true);
      if (target < 0) target = pick(false);  // relax the smoothing constraint
      auto [diag, cell, slash] = diag_info(current, target);
      if (diag && (cell_diag[cell] & (slash ? 2 : 1))) laser = false;
    }

    Vec2 tp = grid.points[target];
    double len = distance(cp, tp);
    t += len / cfg.velocity;
    if (laser) {
      auto [diag, cell, slash] = diag_info(current, target);
      if (diag) cell_diag[cell] |= slash ? 1 : 2;
      proxy.push(tp, t);
    }
    path.moves.push_back({target, tp, laser});
    visited[target] = 1;
    --remaining;
    prev_dir = (tp - cp).normalized();
    current = target;
  }
  return path;
}

}  // namespace lpbf
