#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lpbf/geometry.hpp"
#include "lpbf/rng.hpp"

using namespace lpbf;

namespace {

PolygonDomain unit_square() {
  return PolygonDomain::rectangle({0.0, 0.0}, {1.0, 1.0});
}

// independent parametric intersection check: solve for the crossing point and
// classify against both segments
bool brute_intersect(const Segment& s1, const Segment& s2) {
  Vec2 r = s1.b - s1.a, s = s2.b - s2.a;
  double denom = cross(r, s);
  Vec2 qp = s2.a - s1.a;
  if (denom != 0.0) {
    double t = cross(qp, s) / denom;
    double u = cross(qp, r) / denom;
    bool on1 = t >= 0.0 && t <= 1.0, on2 = u >= 0.0 && u <= 1.0;
    bool interior1 = t > 0.0 && t < 1.0, interior2 = u > 0.0 && u < 1.0;
    return on1 && on2 && (interior1 || interior2);
  }
  if (cross(qp, r) != 0.0) return false;  // parallel, not collinear
  double len2 = dot(r, r);
  double ta = dot(qp, r) / len2;
  double tb = dot(s2.b - s1.a, r) / len2;
  double lo = std::max(std::min(ta, tb), 0.0);
  double hi = std::min(std::max(ta, tb), 1.0);
  return hi > lo;
}

}  // namespace

TEST_CASE("sample_uniform counts lattice points of the unit square") {
  SampleGrid g = sample_uniform(unit_square(), 0.05);
  CHECK(g.size() == 441);  // 21 x 21
  CHECK(g.cols == 21);
  CHECK(g.rows == 21);
}

TEST_CASE("sample_uniform keeps boundary points and anchors at bbox min") {
  SampleGrid g = sample_uniform(unit_square(), 0.05);
  CHECK(g.points.front().x == doctest::Approx(0.0));
  CHECK(g.points.front().y == doctest::Approx(0.0));
  CHECK(g.points.back().x == doctest::Approx(1.0));
  CHECK(g.points.back().y == doctest::Approx(1.0));
}

TEST_CASE("sample_uniform lattice pitch is exact between axis neighbors") {
  PolygonDomain tri = PolygonDomain::from_vertices(
      {{0.1, 0.1}, {1.7, 0.3}, {0.4, 1.9}});
  SampleGrid g = sample_uniform(tri, 0.05);
  REQUIRE(g.size() > 10);
  for (int i = 0; i < g.size(); ++i) {
    int right = g.index_of_cell(g.point_row[i], g.point_col[i] + 1);
    if (right < 0) continue;
    double d = distance(g.points[i], g.points[right]);
    CHECK(std::abs(d - g.hatch) <= 1e-9 * g.hatch);
  }
}

TEST_CASE("sample_uniform rejects degenerate domains") {
  PolygonDomain tiny = PolygonDomain::from_vertices(
      {{0.002, 0.0}, {0.01, 0.008}, {0.0, 0.01}});
  CHECK_THROWS_WITH_AS(static_cast<void>(sample_uniform(tiny, 0.05)),
                       doctest::Contains("degenerate domain"),
                       std::runtime_error);
}

TEST_CASE("knn_candidates returns the Moore neighborhood") {
  SampleGrid g = sample_uniform(unit_square(), 0.05);
  double radius = std::sqrt(2.0) * g.hatch;
  int interior = g.index_of_cell(10, 10);
  int edge = g.index_of_cell(0, 10);
  int corner = g.index_of_cell(0, 0);
  CHECK(knn_candidates(g, interior, radius).size() == 8);
  CHECK(knn_candidates(g, edge, radius).size() == 5);
  CHECK(knn_candidates(g, corner, radius).size() == 3);
}

TEST_CASE("knn_candidates respects the radius on a clipped grid") {
  PolygonDomain pent = PolygonDomain::from_vertices(
      {{0.0, 0.0}, {1.0, 0.0}, {1.3, 0.6}, {0.5, 1.1}, {-0.3, 0.6}});
  SampleGrid g = sample_uniform(pent, 0.05);
  double radius = std::sqrt(2.0) * g.hatch;
  for (int i = 0; i < g.size(); i += 37) {
    for (int n : knn_candidates(g, i, radius)) {
      CHECK(distance(g.points[i], g.points[n]) <= radius * (1.0 + 1e-9));
      CHECK(n != i);
    }
  }
}

TEST_CASE("turning angle basics") {
  CHECK(turning_angle_deg({1, 0}, {1, 0}) == doctest::Approx(180.0));
  CHECK(turning_angle_deg({1, 0}, {0, 1}) == doctest::Approx(90.0));
  CHECK(turning_angle_deg({1, 0}, {-1, 0}) == doctest::Approx(0.0));
}

TEST_CASE("turning angle matches the sharpest lattice re-entry template") {
  // near-reversal one row up: the arctan(1/5) template
  Vec2 out = Vec2{-5.0, 1.0}.normalized();
  double expect = std::atan2(1.0, 5.0) * 180.0 / M_PI;
  CHECK(turning_angle_deg({1, 0}, out) == doctest::Approx(expect));
  Vec2 fwd = Vec2{5.0, 1.0}.normalized();
  CHECK(turning_angle_deg({1, 0}, fwd) == doctest::Approx(180.0 - expect));
}

TEST_CASE("turning angle is rotation invariant") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Vec2 a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    Vec2 b{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (a.norm() < 1e-3 || b.norm() < 1e-3) continue;
    double phi = rng.uniform(0, 2 * M_PI);
    double c = std::cos(phi), s = std::sin(phi);
    Vec2 ar{c * a.x - s * a.y, s * a.x + c * a.y};
    Vec2 br{c * b.x - s * b.y, s * b.x + c * b.y};
    CHECK(turning_angle_deg(a, b) ==
          doctest::Approx(turning_angle_deg(ar, br)).epsilon(1e-9));
  }
}

TEST_CASE("turning angle rejects zero vectors") {
  CHECK_THROWS_AS(static_cast<void>(turning_angle_deg({0, 0}, {1, 0})),
                  std::invalid_argument);
}

TEST_CASE("segment intersection hand cases") {
  CHECK(segments_intersect({{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}));
  // consecutive path segments sharing an endpoint
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{1, 0}, {1, 1}}));
  // parallel offset
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{0, 0.5}, {1, 0.5}}));
  // T junction: endpoint in the other segment's interior
  CHECK(segments_intersect({{0, 0}, {2, 0}}, {{1, 0}, {1, 1}}));
  // collinear overlap vs collinear touch
  CHECK(segments_intersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}));
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{1, 0}, {2, 0}}));
}

TEST_CASE("segment intersection agrees with the parametric oracle") {
  Rng rng(12345);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    Segment s1{{rng.uniform(0, 1), rng.uniform(0, 1)},
               {rng.uniform(0, 1), rng.uniform(0, 1)}};
    Segment s2{{rng.uniform(0, 1), rng.uniform(0, 1)},
               {rng.uniform(0, 1), rng.uniform(0, 1)}};
    bool got = segments_intersect(s1, s2);
    CHECK(got == brute_intersect(s1, s2));
    hits += got;
  }
  CHECK(hits > 1000);  // the sample actually exercises both outcomes
}

TEST_CASE("voronoi partition of a square by its corners") {
  Polygon square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  VoronoiPartition part =
      voronoi_partition(square, {{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  REQUIRE(part.cells.size() == 4);
  double total = 0.0;
  for (const Polygon& cell : part.cells) {
    CHECK(polygon_area(cell) == doctest::Approx(1.0));
    total += polygon_area(cell);
  }
  CHECK(total == doctest::Approx(4.0));
}

TEST_CASE("voronoi single seed returns the island") {
  Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  VoronoiPartition part = voronoi_partition(square, {{0.3, 0.6}});
  REQUIRE(part.cells.size() == 1);
  CHECK(polygon_area(part.cells[0]) == doctest::Approx(1.0));
}

TEST_CASE("voronoi rejects duplicate seeds") {
  Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_THROWS_AS(
      static_cast<void>(voronoi_partition(square, {{0.5, 0.5}, {0.5, 0.5}})),
      std::invalid_argument);
}

TEST_CASE("default seeds give 14 cells tiling the island") {
  Polygon island = {{0, 0}, {5, 0}, {5, 5}, {0, 5}};
  Rng rng(42);
  std::vector<Vec2> seeds = default_voronoi_seeds(island, 10, rng);
  REQUIRE(seeds.size() == 14);
  VoronoiPartition part = voronoi_partition(island, seeds);
  CHECK(part.cells.size() == 14);
  double total = 0.0;
  for (const Polygon& cell : part.cells) total += polygon_area(cell);
  CHECK(total == doctest::Approx(25.0));
}

TEST_CASE("voronoi cells contain exactly the points nearest their seed") {
  Polygon island = {{0, 0}, {5, 0}, {5, 5}, {0, 5}};
  Rng rng(43);
  std::vector<Vec2> seeds = default_voronoi_seeds(island, 10, rng);
  VoronoiPartition part = voronoi_partition(island, seeds);
  for (int trial = 0; trial < 500; ++trial) {
    Vec2 p{rng.uniform(0, 5), rng.uniform(0, 5)};
    int nearest = 0;
    for (std::size_t s = 1; s < seeds.size(); ++s)
      if (distance(p, seeds[s]) < distance(p, seeds[nearest]))
        nearest = static_cast<int>(s);
    // skip points near a bisector where containment is ambiguous
    bool ambiguous = false;
    for (std::size_t s = 0; s < seeds.size(); ++s)
      if (static_cast<int>(s) != nearest &&
          distance(p, seeds[s]) - distance(p, seeds[nearest]) < 1e-6)
        ambiguous = true;
    if (ambiguous) continue;
    CHECK(polygon_contains(part.cells[nearest], p, 1e-9));
  }
}

TEST_CASE("island partition counts") {
  PolygonDomain big = PolygonDomain::rectangle({0, 0}, {30, 30});
  CHECK(island_partition(big, 5.0).islands.size() == 36);

  PolygonDomain one = PolygonDomain::rectangle({0, 0}, {5, 5});
  CHECK(island_partition(one, 5.0).islands.size() == 1);

  PolygonDomain two = PolygonDomain::rectangle({0, 0}, {7, 5});
  IslandGrid grid = island_partition(two, 5.0);
  REQUIRE(grid.islands.size() == 2);
  CHECK(polygon_area(grid.islands[0]) == doctest::Approx(25.0));
  CHECK(polygon_area(grid.islands[1]) == doctest::Approx(10.0));  // 2 x 5 clip
}

TEST_CASE("polygon domain validation") {
  CHECK_THROWS_AS(
      static_cast<void>(PolygonDomain::from_vertices({{0, 0}, {1, 0}})),
      std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(PolygonDomain::from_vertices(
                      {{0, 0}, {1, 1}, {1, 0}, {0, 1}})),  // bowtie
                  std::invalid_argument);
}
