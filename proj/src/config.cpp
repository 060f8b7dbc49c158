#include "lpbf/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lpbf {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': bad number '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  double d = parse_double(key, v);
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw std::runtime_error("config key '" + key + "': expected integer, got '" + v + "'");
  return i;
}

}  // namespace

void ToolkitConfig::apply_ini(const std::string& text) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Setter> setters;
  auto dbl = [&](const std::string& name, double* target) {
    setters[name] = [target](const std::string& key, const std::string& v) {
      *target = parse_double(key, v);
    };
  };
  auto intg = [&](const std::string& name, int* target) {
    setters[name] = [target](const std::string& key, const std::string& v) {
      *target = parse_int(key, v);
    };
  };

  dbl("geometry.hatch_um", &geometry.hatch_um);
  dbl("geometry.boundary_tol_mm", &geometry.boundary_tol_mm);

  dbl("thermal.conductivity", &thermal.conductivity);
  dbl("thermal.density", &thermal.density);
  dbl("thermal.heat_capacity", &thermal.heat_capacity);
  dbl("thermal.melt_temp", &thermal.melt_temp);
  dbl("thermal.ambient_temp", &thermal.ambient_temp);
  dbl("thermal.laser_power", &thermal.laser_power);
  dbl("thermal.laser_diameter_um", &thermal.laser_diameter_um);
  dbl("thermal.velocity_mm_s", &thermal.velocity_mm_s);
  dbl("thermal.absorptivity", &thermal.absorptivity);
  dbl("thermal.dt_s", &thermal.dt_s);
  dbl("thermal.cutoff_k", &thermal.cutoff_k);
  dbl("thermal.calibration_target_um", &thermal.calibration_target_um);

  dbl("env.sensitive_coeff", &env.sensitive_coeff);
  intg("env.collision_threshold", &env.collision_threshold);
  intg("env.proxy_window", &env.proxy_window);
  dbl("env.proxy_sigma_hatches", &env.proxy_sigma_hatches);
  dbl("env.proxy_tau_hatches", &env.proxy_tau_hatches);

  dbl("learner.learning_rate", &learner.learning_rate);
  dbl("learner.discount", &learner.discount);
  intg("learner.batch_size", &learner.batch_size);
  intg("learner.target_sync_steps", &learner.target_sync_steps);
  intg("learner.replay_capacity", &learner.replay_capacity);
  dbl("learner.epsilon_start", &learner.epsilon_start);
  dbl("learner.epsilon_final", &learner.epsilon_final);
  dbl("learner.epsilon_decay", &learner.epsilon_decay);
  intg("learner.episodes", &learner.episodes);
  intg("learner.hidden1", &learner.hidden1);
  intg("learner.hidden2", &learner.hidden2);
  intg("learner.snapshot_every", &learner.snapshot_every);
  setters["learner.seed"] = [this](const std::string& key, const std::string& v) {
    try {
      learner.seed = std::stoull(v);
    } catch (const std::exception&) {
      throw std::runtime_error("config key '" + key + "': bad seed '" + v + "'");
    }
  };
  setters["learner.optimizer"] = [this](const std::string& key, const std::string& v) {
    if (v != "adam" && v != "sgd")
      throw std::runtime_error("config key '" + key + "': expected adam or sgd");
    learner.optimizer = v;
  };

  dbl("pathplan.island_mm", &pathplan.island_mm);
  intg("pathplan.voronoi_random_seeds", &pathplan.voronoi_random_seeds);
  dbl("pathplan.sequence_lambda", &pathplan.sequence_lambda);

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "geometry" && section != "thermal" && section != "env" &&
          section != "learner" && section != "pathplan")
        throw std::runtime_error("unknown config section '" + section + "'");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::runtime_error("config key '" + key + "' outside any section");
    std::string full = section + "." + key;
    auto it = setters.find(full);
    if (it == setters.end())
      throw std::runtime_error("unknown config key '" + full + "'");
    it->second(full, value);
  }
}

ToolkitConfig ToolkitConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  ToolkitConfig cfg;
  cfg.apply_ini(text);
  return cfg;
}

std::string ToolkitConfig::to_ini() const {
  char buf[4096];
  std::snprintf(
      buf, sizeof(buf),
      "[geometry]\n"
      "hatch_um = %.9g\n"
      "boundary_tol_mm = %.9g\n"
      "\n[thermal]\n"
      "conductivity = %.9g\n"
      "density = %.9g\n"
      "heat_capacity = %.9g\n"
      "melt_temp = %.9g\n"
      "ambient_temp = %.9g\n"
      "laser_power = %.9g\n"
      "laser_diameter_um = %.9g\n"
      "velocity_mm_s = %.9g\n"
      "absorptivity = %.9g\n"
      "dt_s = %.9g\n"
      "cutoff_k = %.9g\n"
      "calibration_target_um = %.9g\n"
      "\n[env]\n"
      "sensitive_coeff = %.9g\n"
      "collision_threshold = %d\n"
      "proxy_window = %d\n"
      "proxy_sigma_hatches = %.9g\n"
      "proxy_tau_hatches = %.9g\n"
      "\n[learner]\n"
      "learning_rate = %.9g\n"
      "discount = %.9g\n"
      "batch_size = %d\n"
      "target_sync_steps = %d\n"
      "replay_capacity = %d\n"
      "epsilon_start = %.9g\n"
      "epsilon_final = %.9g\n"
      "epsilon_decay = %.9g\n"
      "episodes = %d\n"
      "seed = %llu\n"
      "hidden1 = %d\n"
      "hidden2 = %d\n"
      "optimizer = %s\n"
      "snapshot_every = %d\n"
      "\n[pathplan]\n"
      "island_mm = %.9g\n"
      "voronoi_random_seeds = %d\n"
      "sequence_lambda = %.9g\n",
      geometry.hatch_um, geometry.boundary_tol_mm, thermal.conductivity,
      thermal.density, thermal.heat_capacity, thermal.melt_temp,
      thermal.ambient_temp, thermal.laser_power, thermal.laser_diameter_um,
      thermal.velocity_mm_s, thermal.absorptivity, thermal.dt_s,
      thermal.cutoff_k, thermal.calibration_target_um, env.sensitive_coeff,
      env.collision_threshold, env.proxy_window, env.proxy_sigma_hatches,
      env.proxy_tau_hatches, learner.learning_rate, learner.discount,
      learner.batch_size, learner.target_sync_steps, learner.replay_capacity,
      learner.epsilon_start, learner.epsilon_final, learner.epsilon_decay,
      learner.episodes,
      static_cast<unsigned long long>(learner.seed), learner.hidden1,
      learner.hidden2, learner.optimizer.c_str(), learner.snapshot_every,
      pathplan.island_mm, pathplan.voronoi_random_seeds,
      pathplan.sequence_lambda);
  return buf;
}

MaterialParams ToolkitConfig::material() const {
  MaterialParams m;
  m.conductivity = thermal.conductivity;
  m.density = thermal.density;
  m.heat_capacity = thermal.heat_capacity;
  m.melt_temp = thermal.melt_temp;
  m.ambient_temp = thermal.ambient_temp;
  return m;
}

LaserParams ToolkitConfig::laser() const {
  LaserParams l;
  l.power = thermal.laser_power;
  l.absorptivity = thermal.absorptivity;
  l.sigma = thermal.laser_diameter_um * 1e-6 / 4.0;
  l.velocity = thermal.velocity_mm_s * 1e-3;
  return l;
}

SimParams ToolkitConfig::sim() const {
  SimParams s;
  s.dt = thermal.dt_s;
  s.cutoff = thermal.cutoff_k;
  return s;
}

EnvConfig ToolkitConfig::env_config() const {
  EnvConfig e;
  e.sensitive_coeff = env.sensitive_coeff;
  e.collision_threshold = env.collision_threshold;
  e.proxy_window = env.proxy_window;
  e.proxy_sigma = env.proxy_sigma_hatches;
  e.proxy_tau = env.proxy_tau_hatches;
  e.velocity = thermal.velocity_mm_s;
  return e;
}

TrainConfig ToolkitConfig::train_config() const {
  TrainConfig t;
  t.learning_rate = learner.learning_rate;
  t.discount = learner.discount;
  t.batch_size = learner.batch_size;
  t.target_sync = learner.target_sync_steps;
  t.replay_capacity = learner.replay_capacity;
  t.epsilon_start = learner.epsilon_start;
  t.epsilon_final = learner.epsilon_final;
  t.epsilon_decay = learner.epsilon_decay;
  t.episodes = learner.episodes;
  t.seed = learner.seed;
  t.hidden = {learner.hidden1, learner.hidden2};
  t.use_adam = learner.optimizer != "sgd";
  return t;
}

}  // namespace lpbf
