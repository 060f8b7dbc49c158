#include "lpbf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpbf {

namespace {

double signed_area(const Polygon& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += cross(a, b);
  }
  return 0.5 * s;
}

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

// p assumed collinear with [a,b]
bool strictly_between(const Vec2& p, const Vec2& a, const Vec2& b) {
  return dot(p - a, p - b) < 0.0;
}

}  // namespace

double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

Vec2 polygon_centroid(const Polygon& poly) {
  const std::size_t n = poly.size();
  double a2 = 0.0;
  Vec2 c{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    double w = cross(p, q);
    a2 += w;
    c.x += (p.x + q.x) * w;
    c.y += (p.y + q.y) * w;
  }
  if (std::abs(a2) < 1e-18) {  // degenerate: fall back to vertex mean
    Vec2 m{0.0, 0.0};
    for (const Vec2& p : poly) m = m + p;
    return m * (1.0 / static_cast<double>(n));
  }
  return c * (1.0 / (3.0 * a2));
}

BoundingBox polygon_bbox(const Polygon& poly) {
  BoundingBox bb{poly.front(), poly.front()};
  for (const Vec2& p : poly) {
    bb.min.x = std::min(bb.min.x, p.x);
    bb.min.y = std::min(bb.min.y, p.y);
    bb.max.x = std::max(bb.max.x, p.x);
    bb.max.y = std::max(bb.max.y, p.y);
  }
  return bb;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 == 0.0) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

bool polygon_contains(const Polygon& poly, const Vec2& p, double tol) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= tol)
      return true;
  }
  // even-odd crossing with half-open rule
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& vi = poly[i];
    const Vec2& vj = poly[j];
    if ((vi.y > p.y) != (vj.y > p.y)) {
      double xint = vi.x + (p.y - vi.y) / (vj.y - vi.y) * (vj.x - vi.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

PolygonDomain PolygonDomain::from_vertices(Polygon vertices) {
  if (vertices.size() < 3)
    throw std::invalid_argument("polygon domain needs at least 3 vertices");
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    Segment si{vertices[i], vertices[(i + 1) % n]};
    if (distance(si.a, si.b) == 0.0)
      throw std::invalid_argument("polygon domain has a zero-length edge");
    for (std::size_t j = i + 1; j < n; ++j) {
      Segment sj{vertices[j], vertices[(j + 1) % n]};
      if (segments_intersect(si, sj))
        throw std::invalid_argument("polygon domain is self-intersecting");
    }
  }
  PolygonDomain d;
  d.area_ = polygon_area(vertices);
  if (d.area_ <= 0.0)
    throw std::invalid_argument("polygon domain has zero area");
  d.bbox_ = polygon_bbox(vertices);
  d.vertices_ = std::move(vertices);
  return d;
}

PolygonDomain PolygonDomain::rectangle(Vec2 min, Vec2 max) {
  return from_vertices({{min.x, min.y}, {max.x, min.y}, {max.x, max.y}, {min.x, max.y}});
}

bool PolygonDomain::contains(const Vec2& p, double tol) const {
  return polygon_contains(vertices_, p, tol);
}

SampleGrid sample_uniform(const PolygonDomain& domain, double hatch,
                          double boundary_tol) {
  if (hatch <= 0.0) throw std::invalid_argument("hatch must be positive");
  SampleGrid g;
  g.hatch = hatch;
  g.origin = domain.bbox().min;
  g.domain_bbox = domain.bbox();
  g.max_length = domain.max_length();
  // +1e-9 absorbs representation error so e.g. 1mm / 0.05mm gives 21 columns
  g.cols = static_cast<int>(std::floor(domain.bbox().width() / hatch + 1e-9)) + 1;
  g.rows = static_cast<int>(std::floor(domain.bbox().height() / hatch + 1e-9)) + 1;
  g.index_at.assign(static_cast<std::size_t>(g.rows) * g.cols, -1);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      Vec2 p{g.origin.x + c * hatch, g.origin.y + r * hatch};
      if (!domain.contains(p, boundary_tol)) continue;
      g.index_at[static_cast<std::size_t>(r) * g.cols + c] =
          static_cast<std::int32_t>(g.points.size());
      g.points.push_back(p);
      g.point_col.push_back(static_cast<std::int16_t>(c));
      g.point_row.push_back(static_cast<std::int16_t>(r));
    }
  }
  if (g.points.empty())
    throw std::runtime_error("degenerate domain: no sample points at hatch " +
                             std::to_string(hatch));
  g.visited.assign(g.points.size(), 0);
  g.collisions.assign(g.points.size(), 0);
  return g;
}

std::vector<int> knn_candidates(const SampleGrid& grid, int center,
                                double radius) {
  std::vector<int> out;
  const int w = static_cast<int>(std::floor(radius / grid.hatch + 1e-9));
  const Vec2 cp = grid.points[center];
  const int cr = grid.point_row[center];
  const int cc = grid.point_col[center];
  const double r2 = radius * radius * (1.0 + 1e-9);
  for (int dr = -w; dr <= w; ++dr) {
    for (int dc = -w; dc <= w; ++dc) {
      if (dr == 0 && dc == 0) continue;
      int idx = grid.index_of_cell(cr + dr, cc + dc);
      if (idx < 0) continue;
      if ((grid.points[idx] - cp).norm2() <= r2) out.push_back(idx);
    }
  }
  return out;
}

double turning_angle_deg(const Vec2& incoming_dir, const Vec2& outgoing_dir) {
  if (incoming_dir.norm2() == 0.0 || outgoing_dir.norm2() == 0.0)
    throw std::invalid_argument("turning angle of zero-length direction");
  Vec2 rev = -incoming_dir;
  double ang = std::atan2(std::abs(cross(rev, outgoing_dir)),
                          dot(rev, outgoing_dir));
  return ang * 180.0 / M_PI;
}

bool segments_intersect(const Segment& s1, const Segment& s2) {
  const Vec2 &p1 = s1.a, &p2 = s1.b, &p3 = s2.a, &p4 = s2.b;
  double d1 = orient(p3, p4, p1);
  double d2 = orient(p3, p4, p2);
  double d3 = orient(p1, p2, p3);
  double d4 = orient(p1, p2, p4);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  // collinear segments: positive-length overlap shares interior points
  if (d1 == 0 && d2 == 0) {
    Vec2 u = p2 - p1;
    double len2 = u.norm2();
    double sa = dot(p3 - p1, u);
    double sb = dot(p4 - p1, u);
    double lo = std::max(std::min(sa, sb), 0.0);
    double hi = std::min(std::max(sa, sb), len2);
    return hi > lo;
  }
  // T-junctions: an endpoint strictly inside the other segment
  if (d1 == 0 && strictly_between(p1, p3, p4)) return true;
  if (d2 == 0 && strictly_between(p2, p3, p4)) return true;
  if (d3 == 0 && strictly_between(p3, p1, p2)) return true;
  if (d4 == 0 && strictly_between(p4, p1, p2)) return true;
  return false;
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double c) {
  Polygon out;
  const std::size_t k = poly.size();
  if (k == 0) return out;
  out.reserve(k + 2);
  for (std::size_t i = 0; i < k; ++i) {
    const Vec2& prev = poly[(i + k - 1) % k];
    const Vec2& cur = poly[i];
    double dp = dot(prev, n) - c;
    double dc = dot(cur, n) - c;
    bool pin = dp <= 0.0, cin = dc <= 0.0;
    if (cin) {
      if (!pin) {
        double t = dp / (dp - dc);
        out.push_back(prev + (cur - prev) * t);
      }
      out.push_back(cur);
    } else if (pin) {
      double t = dp / (dp - dc);
      out.push_back(prev + (cur - prev) * t);
    }
  }
  return out;
}

VoronoiPartition voronoi_partition(const Polygon& island,
                                   const std::vector<Vec2>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("voronoi needs seeds");
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      if (distance(seeds[i], seeds[j]) < 1e-12)
        throw std::invalid_argument("duplicate voronoi seeds");
  VoronoiPartition part;
  part.seeds = seeds;
  part.cells.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Polygon cell = island;
    for (std::size_t j = 0; j < seeds.size() && cell.size() >= 3; ++j) {
      if (j == i) continue;
      // keep the side closer to seed i
      Vec2 n = seeds[j] - seeds[i];
      Vec2 mid = (seeds[i] + seeds[j]) * 0.5;
      cell = clip_halfplane(cell, n, dot(mid, n));
    }
    if (cell.size() < 3) cell.clear();
    part.cells.push_back(std::move(cell));
  }
  return part;
}

std::vector<Vec2> default_voronoi_seeds(const Polygon& island, int n_random,
                                        Rng& rng) {
  BoundingBox bb = polygon_bbox(island);
  std::vector<Vec2> seeds = {{bb.min.x, bb.min.y},
                             {bb.max.x, bb.min.y},
                             {bb.max.x, bb.max.y},
                             {bb.min.x, bb.max.y}};
  int added = 0;
  int guard = 0;
  while (added < n_random && guard < 100000) {
    ++guard;
    Vec2 p{rng.uniform(bb.min.x, bb.max.x), rng.uniform(bb.min.y, bb.max.y)};
    if (!polygon_contains(island, p, 0.0)) continue;
    bool dup = false;
    for (const Vec2& s : seeds)
      if (distance(s, p) < 1e-9) dup = true;
    if (dup) continue;
    seeds.push_back(p);
    ++added;
  }
  return seeds;
}

IslandGrid island_partition(const PolygonDomain& domain, double size) {
  if (size <= 0.0) throw std::invalid_argument("island size must be positive");
  IslandGrid grid;
  grid.size = size;
  const BoundingBox& bb = domain.bbox();
  int nx = static_cast<int>(std::ceil(bb.width() / size - 1e-9));
  int ny = static_cast<int>(std::ceil(bb.height() / size - 1e-9));
  nx = std::max(nx, 1);
  ny = std::max(ny, 1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double x0 = bb.min.x + ix * size, x1 = std::min(x0 + size, bb.max.x);
      double y0 = bb.min.y + iy * size, y1 = std::min(y0 + size, bb.max.y);
      Polygon cell = domain.vertices();
      cell = clip_halfplane(cell, {-1, 0}, -x0);
      cell = clip_halfplane(cell, {1, 0}, x1);
      cell = clip_halfplane(cell, {0, -1}, -y0);
      cell = clip_halfplane(cell, {0, 1}, y1);
      if (cell.size() < 3 || polygon_area(cell) < 1e-9 * size * size) continue;
      grid.centroids.push_back(polygon_centroid(cell));
      grid.islands.push_back(std::move(cell));
    }
  }
  return grid;
}

}  // namespace lpbf
