#include "lpbf/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lpbf {

namespace {

constexpr double kMmToM = 1e-3;

// per-energy kernel amplitude at lateral distance d, z = 0
double unit_gain(double d, double tau, const MaterialParams& mat,
                 double sigma) {
  double a = mat.diffusivity();
  double s2 = sigma * sigma + 2.0 * a * tau;
  double lateral = std::exp(-d * d / (2.0 * s2)) / (2.0 * M_PI * s2);
  double depth = 1.0 / std::sqrt(4.0 * M_PI * a * tau);
  return 2.0 / (mat.density * mat.heat_capacity) * lateral * depth;
}

}  // namespace

void MaterialParams::validate() const {
  if (conductivity <= 0 || density <= 0 || heat_capacity <= 0 ||
      melt_temp <= 0 || ambient_temp <= 0)
    throw std::invalid_argument("material parameters must be positive");
  if (melt_temp <= ambient_temp)
    throw std::invalid_argument("melt temperature must exceed ambient");
}

void LaserParams::validate() const {
  if (power <= 0 || sigma <= 0 || velocity <= 0)
    throw std::invalid_argument("laser parameters must be positive");
  if (absorptivity <= 0 || absorptivity > 1)
    throw std::invalid_argument("absorptivity must be in (0, 1]");
}

double kernel_temp(const EmissionEvent& ev, double x, double y, double z,
                   double t, const MaterialParams& mat, double sigma,
                   double tau_min) {
  if (t < ev.time)
    throw std::invalid_argument("temperature query before event time");
  double tau = std::max(t - ev.time, tau_min);
  double a = mat.diffusivity();
  double s2 = sigma * sigma + 2.0 * a * tau;
  double dx = x - ev.x, dy = y - ev.y;
  double lateral = std::exp(-(dx * dx + dy * dy) / (2.0 * s2)) /
                   (2.0 * M_PI * s2);
  double depth = std::exp(-z * z / (4.0 * a * tau)) /
                 std::sqrt(4.0 * M_PI * a * tau);
  return 2.0 * ev.energy / (mat.density * mat.heat_capacity) * lateral * depth;
}

std::vector<EmissionEvent> discretize_toolpath(const Toolpath& path,
                                               const LaserParams& laser,
                                               double dt) {
  if (dt <= 0) throw std::invalid_argument("dt must be positive");
  if (path.moves.empty()) throw std::invalid_argument("empty toolpath");
  std::vector<EmissionEvent> events;
  double t = 0.0;
  for (std::size_t i = 1; i < path.moves.size(); ++i) {
    Vec2 a = path.moves[i - 1].pos * kMmToM;
    Vec2 b = path.moves[i].pos * kMmToM;
    double len = distance(a, b);
    double dur = len / laser.velocity;
    if (path.moves[i].laser && len > 0.0) {
      int n = std::max(1, static_cast<int>(std::ceil(dur / dt - 1e-9)));
      double e = laser.absorptivity * laser.power * dur / n;
      for (int j = 0; j < n; ++j) {
        double frac = (j + 0.5) / n;
        Vec2 p = a + (b - a) * frac;
        events.push_back({p.x, p.y, t + frac * dur, e});
      }
    }
    t += dur;
  }
  return events;
}

DepthStats depth_stats(const MeltPoolTrace& trace) {
  if (trace.steps.empty())
    throw std::invalid_argument("depth stats of empty trace");
  DepthStats s;
  for (const auto& st : trace.steps) {
    s.avg_um += st.depth_um;
    s.peak_um = std::max(s.peak_um, st.depth_um);
  }
  s.avg_um /= static_cast<double>(trace.steps.size());
  return s;
}

ThermalField::ThermalField(std::vector<EmissionEvent> events,
                           MaterialParams mat, LaserParams laser,
                           SimParams sim)
    : events_(std::move(events)), mat_(mat), laser_(laser), sim_(sim) {
  mat_.validate();
  laser_.validate();
  for (std::size_t i = 1; i < events_.size(); ++i)
    if (events_[i].time < events_[i - 1].time)
      throw std::invalid_argument("events must be time-ordered");

  std::unordered_map<std::int64_t, int> key_to_bucket;
  const double cell = sim_.hash_cell;
  double max_d = 0.0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const EmissionEvent& ev = events_[i];
    int cx = static_cast<int>(std::floor(ev.x / cell));
    int cy = static_cast<int>(std::floor(ev.y / cell));
    std::int64_t key = (static_cast<std::int64_t>(cx) << 32) ^
                       static_cast<std::int64_t>(static_cast<std::uint32_t>(cy));
    auto [it, fresh] = key_to_bucket.try_emplace(key, static_cast<int>(buckets_.size()));
    if (fresh) {
      buckets_.emplace_back();
      buckets_.back().cx = cx;
      buckets_.back().cy = cy;
    }
    Bucket& b = buckets_[it->second];
    double cum = b.cum_energy.empty() ? 0.0 : b.cum_energy.back();
    b.idx.push_back(static_cast<int>(i));
    b.times.push_back(ev.time);
    b.cum_energy.push_back(cum + ev.energy);
    b.max_energy = std::max(b.max_energy, ev.energy);
    max_d = std::max({max_d, std::abs(ev.x), std::abs(ev.y)});
  }

  // conservative per-energy peak gain over lag, tabulated over distance
  if (sim_.cutoff > 0.0 && !events_.empty()) {
    gain_step_ = 0.5 * cell;
    double dmax = 2.0 * (max_d + cell) * std::sqrt(2.0) + 1e-3;
    int n = static_cast<int>(dmax / gain_step_) + 2;
    gain_table_.resize(n);
    const double tau_lo = sim_.tau_min();
    for (int i = 0; i < n; ++i) {
      double d = i * gain_step_;
      // golden-section maximum over log tau
      double lo = std::log(tau_lo), hi = std::log(1e5);
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      double f1 = unit_gain(d, std::exp(x1), mat_, laser_.sigma);
      double f2 = unit_gain(d, std::exp(x2), mat_, laser_.sigma);
      for (int it2 = 0; it2 < 60; ++it2) {
        if (f1 < f2) {
          lo = x1; x1 = x2; f1 = f2;
          x2 = lo + phi * (hi - lo);
          f2 = unit_gain(d, std::exp(x2), mat_, laser_.sigma);
        } else {
          hi = x2; x2 = x1; f2 = f1;
          x1 = hi - phi * (hi - lo);
          f1 = unit_gain(d, std::exp(x1), mat_, laser_.sigma);
        }
      }
      gain_table_[i] = 1.05 * std::max(f1, f2);  // slack keeps the bound safe
    }
  }
}

double ThermalField::peak_gain(double lateral_dist) const {
  int i = static_cast<int>(lateral_dist / gain_step_);  // floor: gain decreasing
  if (i >= static_cast<int>(gain_table_.size()))
    i = static_cast<int>(gain_table_.size()) - 1;
  return gain_table_[i];
}

void ThermalField::collect(double x, double y, double t,
                           std::vector<int>& out) const {
  out.clear();
  const double cell = sim_.hash_cell;
  for (const Bucket& b : buckets_) {
    auto it = std::upper_bound(b.times.begin(), b.times.end(), t);
    int k = static_cast<int>(it - b.times.begin());
    if (k == 0) continue;
    if (sim_.cutoff > 0.0) {
      double bx0 = b.cx * cell, by0 = b.cy * cell;
      double dx = std::max({bx0 - x, 0.0, x - (bx0 + cell)});
      double dy = std::max({by0 - y, 0.0, y - (by0 + cell)});
      double dist = std::hypot(dx, dy);
      if (b.cum_energy[k - 1] * peak_gain(dist) < sim_.cutoff) continue;
      for (int j = k - 1; j >= 0; --j) {
        double tau = std::max(t - b.times[j], sim_.tau_min());
        if (b.max_energy * unit_gain(0.0, tau, mat_, laser_.sigma) <
            sim_.cutoff)
          break;  // older events in this bucket are each below cutoff too
        out.push_back(b.idx[j]);
      }
    } else {
      out.insert(out.end(), b.idx.begin(), b.idx.begin() + k);
    }
  }
}

double ThermalField::temperature_over(const std::vector<int>& idx, double x,
                                      double y, double z, double t) const {
  double rise = 0.0;
  for (int i : idx) {
    const EmissionEvent& ev = events_[i];
    if (ev.time > t) continue;
    rise += kernel_temp(ev, x, y, z, t, mat_, laser_.sigma, sim_.tau_min());
  }
  return mat_.ambient_temp + rise;
}

double ThermalField::temperature(double x, double y, double z,
                                 double t) const {
  thread_local std::vector<int> scratch;
  collect(x, y, t, scratch);
  return temperature_over(scratch, x, y, z, t);
}

double ThermalField::melt_depth(double x, double y, double t) const {
  thread_local std::vector<int> scratch;
  collect(x, y, t, scratch);
  auto molten = [&](double z) {
    return temperature_over(scratch, x, y, z, t) >= mat_.melt_temp;
  };
  if (!molten(0.0)) return 0.0;
  // coarse scan for the deepest molten sample, then bisect the boundary
  double z_lo = 0.0;
  double z_hi = sim_.probe_depth;
  bool found_hi = false;
  for (double z = sim_.probe_step; z <= sim_.probe_depth + 1e-15;
       z += sim_.probe_step) {
    if (molten(z)) {
      z_lo = z;
    } else {
      z_hi = z;
      found_hi = true;
      break;
    }
  }
  if (!found_hi) return sim_.probe_depth;  // saturated probe range
  while (z_hi - z_lo > sim_.probe_refine) {
    double mid = 0.5 * (z_lo + z_hi);
    (molten(mid) ? z_lo : z_hi) = mid;
  }
  return z_lo;
}

MeltPoolTrace simulate_trace(const Toolpath& path, const MaterialParams& mat,
                             const LaserParams& laser, const SimParams& sim) {
  std::vector<EmissionEvent> events = discretize_toolpath(path, laser, sim.dt);
  ThermalField field(events, mat, laser, sim);
  MeltPoolTrace trace;
  trace.steps.reserve(events.size());
  for (const EmissionEvent& ev : field.events()) {
    double d = field.melt_depth(ev.x, ev.y, ev.time);
    trace.steps.push_back({ev.time, Vec2{ev.x / kMmToM, ev.y / kMmToM},
                           d * 1e6});
  }
  return trace;
}

std::vector<std::pair<double, double>> angle_template_study(
    const std::vector<double>& angles_deg, const MaterialParams& mat,
    const LaserParams& laser, const SimParams& sim, double leg_mm) {
  std::vector<std::pair<double, double>> out;
  out.reserve(angles_deg.size());
  for (double alpha : angles_deg) {
    if (alpha <= 0.0 || alpha > 180.0)
      throw std::invalid_argument("template angle must be in (0, 180]");
    double rad = alpha * M_PI / 180.0;
    Vec2 in_dir{1.0, 0.0};
    Vec2 out_dir{-std::cos(rad), std::sin(rad)};
    Vec2 vertex{0.0, 0.0};
    Toolpath path;
    path.hatch = 0.05;
    path.generator = "angle-template";
    path.moves.push_back({-1, vertex - in_dir * leg_mm, false});
    path.moves.push_back({-1, vertex, true});
    path.moves.push_back({-1, vertex + out_dir * leg_mm, true});
    MeltPoolTrace trace = simulate_trace(path, mat, laser, sim);
    double best = 0.0;
    for (const auto& st : trace.steps)
      if (distance(st.pos, vertex) <= 0.5) best = std::max(best, st.depth_um);
    out.emplace_back(alpha, best);
  }
  return out;
}

double steady_state_depth_um(const MaterialParams& mat,
                             const LaserParams& laser, const SimParams& sim,
                             double line_mm) {
  Toolpath path;
  path.hatch = 0.05;
  path.generator = "straight";
  path.moves.push_back({-1, {0.0, 0.0}, false});
  path.moves.push_back({-1, {line_mm, 0.0}, true});
  std::vector<EmissionEvent> events = discretize_toolpath(path, laser, sim.dt);
  ThermalField field(events, mat, laser, sim);
  int n = static_cast<int>(events.size());
  int tail = std::max(1, std::min(20, n / 4));
  std::vector<double> depths;
  depths.reserve(tail);
  for (int i = n - tail; i < n; ++i) {
    const EmissionEvent& ev = events[i];
    depths.push_back(field.melt_depth(ev.x, ev.y, ev.time) * 1e6);
  }
  std::sort(depths.begin(), depths.end());
  return depths[depths.size() / 2];
}

double calibrate_absorptivity(const MaterialParams& mat, LaserParams laser,
                              const SimParams& sim, double target_um,
                              double lo, double hi) {
  auto depth_at = [&](double a) {
    laser.absorptivity = a;
    return steady_state_depth_um(mat, laser, sim);
  };
  double d_lo = depth_at(lo), d_hi = depth_at(hi);
  if ((d_lo - target_um) * (d_hi - target_um) > 0.0)
    throw std::runtime_error("absorptivity bracket does not reach target depth (" +
                             std::to_string(d_lo) + ".." + std::to_string(d_hi) +
                             " um)");
  for (int i = 0; i < 40; ++i) {
    double mid = 0.5 * (lo + hi);
    double d = depth_at(mid);
    if (std::abs(d - target_um) < 0.05 || hi - lo < 1e-6) return mid;
    if ((d - target_um) * (d_lo - target_um) > 0.0) {
      lo = mid;
      d_lo = d;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void write_trace_csv(const MeltPoolTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace csv: " + path);
  out << "step,time_s,x_mm,y_mm,depth_um\n";
  char buf[160];
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& st = trace.steps[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", i, st.time,
                  st.pos.x, st.pos.y, st.depth_um);
    out << buf;
  }
}

void write_field_csv(const ThermalField& field, const BoundingBox& region_mm,
                     double t, double pitch_mm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write field csv: " + path);
  out << "x_mm,y_mm,temp_k\n";
  char buf[120];
  for (double y = region_mm.min.y; y <= region_mm.max.y + 1e-12;
       y += pitch_mm) {
    for (double x = region_mm.min.x; x <= region_mm.max.x + 1e-12;
         x += pitch_mm) {
      double temp = field.temperature(x * kMmToM, y * kMmToM, 0.0, t);
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", x, y, temp);
      out << buf;
    }
  }
}

}  // namespace lpbf
