#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lpbf/toolpath.hpp"

namespace lpbf {

// All thermal quantities are SI internally: meters, seconds, kelvin, joules.

struct MaterialParams {
  double conductivity = 30.0;    // W/(m K), near-melt 316L
  double density = 4000.0;       // kg/m^3, ~50% powder-bed packing
  double heat_capacity = 500.0;  // J/(kg K)
  double melt_temp = 1700.0;     // K
  double ambient_temp = 300.0;   // K

  double diffusivity() const {
    return conductivity / (density * heat_capacity);
  }
  void validate() const;
};

struct LaserParams {
  double power = 50.0;        // W
  double absorptivity = 0.5;  // (0, 1]
  double sigma = 6.25e-6;     // m, Gaussian beam sigma (diameter / 4)
  double velocity = 1.0;      // m/s

  void validate() const;
};

struct EmissionEvent {
  double x = 0.0, y = 0.0;  // m
  double time = 0.0;        // s
  double energy = 0.0;      // J
};

struct SimParams {
  double dt = 2.5e-5;           // s, emission step
  double cutoff = 0.1;          // K, per-event prune bound; <= 0 disables
  double hash_cell = 2.5e-4;    // m, spatial hash pitch
  double probe_depth = 2.0e-4;  // m, melt-depth probe range
  double probe_step = 2.0e-6;   // m, coarse probe pitch
  double probe_refine = 1.0e-7; // m, bisection resolution

  double tau_min() const { return 0.5 * dt; }
};

// Temperature rise at (x,y,z), z >= 0 below the surface, of one instantaneous
// Gaussian surface source on an insulated half-space. Lateral variance grows
// as sigma^2 + 2*a*tau, depth variance as 2*a*tau; the image source doubles
// the amplitude. tau is floored at tau_min.
double kernel_temp(const EmissionEvent& ev, double x, double y, double z,
                   double t, const MaterialParams& mat, double sigma,
                   double tau_min);

// Laser-on segments emit events of energy A*P*dt at spacing velocity*dt
// (final partial step folded in by equal splitting); laser-off segments
// advance time without emitting.
std::vector<EmissionEvent> discretize_toolpath(const Toolpath& path,
                                               const LaserParams& laser,
                                               double dt);

struct MeltPoolTrace {
  struct Step {
    double time = 0.0;     // s
    Vec2 pos;              // mm
    double depth_um = 0.0;
  };
  std::vector<Step> steps;
};

struct DepthStats {
  double avg_um = 0.0;
  double peak_um = 0.0;
};

DepthStats depth_stats(const MeltPoolTrace& trace);

// Superposed field over an immutable event list. Queries are pure; events are
// bucketed in a uniform spatial hash so far-away or long-cooled events are
// pruned against the cutoff.
class ThermalField {
 public:
  ThermalField(std::vector<EmissionEvent> events, MaterialParams mat,
               LaserParams laser, SimParams sim);

  double temperature(double x, double y, double z, double t) const;
  double melt_depth(double x, double y, double t) const;  // m

  // Indices of events that may contribute >= cutoff at (x,y,*) at time t.
  void collect(double x, double y, double t, std::vector<int>& out) const;
  double temperature_over(const std::vector<int>& idx, double x, double y,
                          double z, double t) const;

  const std::vector<EmissionEvent>& events() const { return events_; }
  const MaterialParams& material() const { return mat_; }
  const SimParams& sim() const { return sim_; }

 private:
  struct Bucket {
    std::vector<int> idx;          // time-ascending
    std::vector<double> times;
    std::vector<double> cum_energy;
    double max_energy = 0.0;
    int cx = 0, cy = 0;
  };

  double peak_gain(double lateral_dist) const;  // conservative table lookup

  std::vector<EmissionEvent> events_;
  MaterialParams mat_;
  LaserParams laser_;
  SimParams sim_;
  std::vector<Bucket> buckets_;
  std::vector<double> gain_table_;
  double gain_step_ = 0.0;
};

// Depth under the beam at every laser-on emission step of a path.
MeltPoolTrace simulate_trace(const Toolpath& path, const MaterialParams& mat,
                             const LaserParams& laser, const SimParams& sim);

// Two 1 mm legs meeting at each turning angle; reports the maximum melt
// depth within 0.5 mm of the vertex.
std::vector<std::pair<double, double>> angle_template_study(
    const std::vector<double>& angles_deg, const MaterialParams& mat,
    const LaserParams& laser, const SimParams& sim, double leg_mm = 1.0);

// Steady melt depth of a long straight scan (median of the trailing steps).
double steady_state_depth_um(const MaterialParams& mat,
                             const LaserParams& laser, const SimParams& sim,
                             double line_mm = 2.0);

// Bisect absorptivity within [lo, hi] until the straight-scan steady depth
// matches target_um.
double calibrate_absorptivity(const MaterialParams& mat, LaserParams laser,
                              const SimParams& sim, double target_um = 45.0,
                              double lo = 0.2, double hi = 0.8);

void write_trace_csv(const MeltPoolTrace& trace, const std::string& path);
void write_field_csv(const ThermalField& field, const BoundingBox& region_mm,
                     double t, double pitch_mm, const std::string& path);

}  // namespace lpbf
