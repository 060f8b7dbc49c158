#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpbf/rng.hpp"

namespace lpbf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    return {x / n, y / n};
  }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

using Polygon = std::vector<Vec2>;  // open ring, CCW or CW

double polygon_area(const Polygon& poly);  // absolute
Vec2 polygon_centroid(const Polygon& poly);

struct BoundingBox {
  Vec2 min, max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double diagonal() const { return (max - min).norm(); }
};

BoundingBox polygon_bbox(const Polygon& poly);

// Boundary points within tol count as inside.
bool polygon_contains(const Polygon& poly, const Vec2& p, double tol = 1e-9);

// A simple polygon describing one layer's printing domain. Coordinates in mm.
class PolygonDomain {
 public:
  // Validates: >= 3 vertices, positive area, no self-intersections.
  static PolygonDomain from_vertices(Polygon vertices);

  static PolygonDomain rectangle(Vec2 min, Vec2 max);

  const Polygon& vertices() const { return vertices_; }
  const BoundingBox& bbox() const { return bbox_; }
  double area() const { return area_; }

  // Longest extent used as the Eq.-13 style fallback cap.
  double max_length() const { return bbox_.diagonal(); }

  // Boundary points within tol count as inside.
  bool contains(const Vec2& p, double tol = 1e-9) const;

 private:
  Polygon vertices_;
  BoundingBox bbox_;
  double area_ = 0.0;
};

// Uniformly sampled points of a domain on an axis-aligned lattice of pitch
// hatch, anchored at the bounding-box minimum corner, ordered row-major
// (y rows ascending, x ascending within a row).
struct SampleGrid {
  double hatch = 0.0;  // mm
  Vec2 origin;         // lattice anchor
  int cols = 0, rows = 0;
  std::vector<Vec2> points;
  std::vector<std::int16_t> point_col, point_row;
  std::vector<std::int32_t> index_at;  // rows*cols lattice, -1 where absent
  std::vector<std::uint8_t> visited;
  std::vector<int> collisions;
  BoundingBox domain_bbox;
  double max_length = 0.0;

  int size() const { return static_cast<int>(points.size()); }

  int index_of_cell(int row, int col) const {
    if (row < 0 || row >= rows || col < 0 || col >= cols) return -1;
    return index_at[static_cast<std::size_t>(row) * cols + col];
  }

  void reset_visited() {
    std::fill(visited.begin(), visited.end(), std::uint8_t{0});
  }
};

SampleGrid sample_uniform(const PolygonDomain& domain, double hatch,
                          double boundary_tol = 1e-9);

// All grid points within `radius` of `center` (excluding center itself).
// With the default radius sqrt(2)*hatch this is the Moore neighborhood.
std::vector<int> knn_candidates(const SampleGrid& grid, int center,
                                double radius);

// Turning angle in degrees between the reversed incoming direction and the
// outgoing direction: 180 = straight continuation, 0 = full reversal.
double turning_angle_deg(const Vec2& incoming_dir, const Vec2& outgoing_dir);

struct Segment {
  Vec2 a, b;
  bool laser = true;
};

// True iff the segments share a point interior to at least one of them.
// Touching only at mutual endpoints does not count.
bool segments_intersect(const Segment& s1, const Segment& s2);

struct VoronoiPartition {
  std::vector<Vec2> seeds;
  std::vector<Polygon> cells;  // one per seed, clipped to the island
};

// Clipped Voronoi cells tiling `island`. Seeds must be distinct.
VoronoiPartition voronoi_partition(const Polygon& island,
                                   const std::vector<Vec2>& seeds);

// Default seed set: the island bbox corners plus n uniformly random interior
// points drawn from rng.
std::vector<Vec2> default_voronoi_seeds(const Polygon& island, int n_random,
                                        Rng& rng);

struct IslandGrid {
  double size = 0.0;  // mm
  std::vector<Polygon> islands;  // axis-aligned cells clipped to the domain
  std::vector<Vec2> centroids;
};

IslandGrid island_partition(const PolygonDomain& domain, double size);

// Sutherland-Hodgman clip of a polygon to the halfplane dot(p,n) <= c.
Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double c);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace lpbf
