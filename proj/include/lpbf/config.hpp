#pragma once

#include <string>

#include "lpbf/dqn.hpp"
#include "lpbf/rl_env.hpp"
#include "lpbf/thermal.hpp"

namespace lpbf {

struct GeometrySettings {
  double hatch_um = 50.0;
  double boundary_tol_mm = 1e-9;
};

struct ThermalSettings {
  double conductivity = 30.0;      // W/(m K), near-melt 316L
  double density = 4000.0;         // kg/m^3, ~50% powder-bed packing
  double heat_capacity = 500.0;    // J/(kg K)
  double melt_temp = 1700.0;       // K
  double ambient_temp = 300.0;     // K
  double laser_power = 50.0;       // W
  double laser_diameter_um = 25.0; // sigma = diameter / 4
  double velocity_mm_s = 1000.0;
  double absorptivity = 0.0;       // 0 = calibrate against the target depth
  double dt_s = 2.5e-5;
  double cutoff_k = 0.1;
  double calibration_target_um = 45.0;
};

struct EnvSettings {
  double sensitive_coeff = 3.0;
  int collision_threshold = 3;
  int proxy_window = 64;
  double proxy_sigma_hatches = 2.0;
  double proxy_tau_hatches = 64.0;
};

struct LearnerSettings {
  double learning_rate = 0.001;
  double discount = 0.99;
  int batch_size = 64;
  int target_sync_steps = 80;
  int replay_capacity = 1000;
  double epsilon_start = 1.0;
  double epsilon_final = 0.0;
  double epsilon_decay = 200.0;
  int episodes = 1000;
  std::uint64_t seed = 1;
  int hidden1 = 128;
  int hidden2 = 128;
  std::string optimizer = "adam";  // or "sgd"
  int snapshot_every = 100;
};

struct PathplanSettings {
  double island_mm = 5.0;
  int voronoi_random_seeds = 10;
  double sequence_lambda = 0.5;
};

struct ToolkitConfig {
  GeometrySettings geometry;
  ThermalSettings thermal;
  EnvSettings env;
  LearnerSettings learner;
  PathplanSettings pathplan;

  // Parses [section] key = value text over the current values. Unknown
  // sections or keys raise an error naming the offender.
  void apply_ini(const std::string& text);
  static ToolkitConfig from_file(const std::string& path);

  std::string to_ini() const;

  double hatch_mm() const { return geometry.hatch_um * 1e-3; }
  MaterialParams material() const;
  LaserParams laser() const;  // uses thermal.absorptivity as-is
  SimParams sim() const;
  EnvConfig env_config() const;
  TrainConfig train_config() const;
};

}  // namespace lpbf
