#include "lpbf/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "lpbf/baselines.hpp"
#include "lpbf/pathplan.hpp"
#include "lpbf/svg.hpp"

namespace lpbf {

namespace fs = std::filesystem;

namespace {

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const ToolkitConfig& cfg,
                    const std::vector<std::string>& outputs,
                    std::optional<double> calibrated_absorptivity) {
  for (const std::string& f : outputs) {
    if (!fs::exists(fs::path(out_dir) / f))
      throw std::runtime_error("declared output missing: " + f);
  }
  nlohmann::json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  j["timestamp_utc"] = timestamp_utc();
  j["seed"] = cfg.learner.seed;
  j["config_ini"] = cfg.to_ini();
  if (calibrated_absorptivity)
    j["calibration"] = {{"absorptivity", *calibrated_absorptivity}};
  j["outputs"] = outputs;
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir);
  out << j.dump(2) << "\n";
}

int guarded(const std::string& command, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", command.c_str(), e.what());
    return 1;
  }
}

SampleGrid make_grid(const ToolkitConfig& cfg, const PolygonDomain& domain) {
  return sample_uniform(domain, cfg.hatch_mm(), cfg.geometry.boundary_tol_mm);
}

Toolpath baseline_path(const ToolkitConfig& cfg, const SampleGrid& grid,
                       const std::string& strategy) {
  if (strategy == "zigzag") return zigzag(grid);
  if (strategy == "chessboard") return chessboard(grid, cfg.pathplan.island_mm);
  if (strategy == "atg") return atg_greedy(grid, cfg.env_config());
  throw std::runtime_error("unknown strategy '" + strategy + "'");
}

double ensure_absorptivity(const ToolkitConfig& cfg) {
  if (cfg.thermal.absorptivity > 0.0) return cfg.thermal.absorptivity;
  return calibrate_absorptivity(cfg.material(), cfg.laser(), cfg.sim(),
                                cfg.thermal.calibration_target_um);
}

}  // namespace

DomainFile load_domain(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read domain file: " + file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed domain file " + file + ": " + e.what());
  }
  std::string units = j.value("units", "mm");
  if (units != "mm")
    throw std::runtime_error("domain file units must be mm, got " + units);
  Polygon verts;
  for (const auto& v : j.at("vertices"))
    verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  DomainFile d{PolygonDomain::from_vertices(verts), {}};
  if (j.contains("voronoi_seeds"))
    for (const auto& v : j["voronoi_seeds"])
      d.voronoi_seeds.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  return d;
}

std::vector<double> template_angles() {
  return {180.0,
          135.0,
          90.0,
          45.0,
          std::atan2(1.0, 2.0) * 180.0 / M_PI,
          std::atan2(1.0, 3.0) * 180.0 / M_PI,
          std::atan2(1.0, 4.0) * 180.0 / M_PI,
          std::atan2(1.0, 5.0) * 180.0 / M_PI};
}

int cmd_train(const ToolkitConfig& cfg, const std::string& domain_file,
              const std::string& out_dir) {
  return guarded("train", [&] {
    DomainFile dom = load_domain(domain_file);
    fs::create_directories(out_dir);
    SampleGrid grid = make_grid(cfg, dom.domain);

    ScanEnv env(grid, cfg.env_config());
    ScanEnv snapshot_env(grid, cfg.env_config());
    std::vector<std::string> outputs;
    SnapshotFn snapshot;
    if (cfg.learner.snapshot_every > 0) {
      snapshot = [&](int episode, const QNetwork& net) {
        if (episode % cfg.learner.snapshot_every != 0) return;
        char name[64];
        std::snprintf(name, sizeof(name), "pattern_ep%04d.svg", episode);
        svg_toolpath(greedy_rollout(net, snapshot_env),
                     (fs::path(out_dir) / name).string());
        outputs.push_back(name);
      };
    }

    TrainResult result = train(env, cfg.train_config(), snapshot);

    save_model(result.policy, cfg.train_config(), cfg.thermal.absorptivity,
               (fs::path(out_dir) / "model.json").string());
    result.log.save_csv((fs::path(out_dir) / "training_log.csv").string());

    Series reward{"episode reward", {}, "#d62728"};
    Series sensitive{"sensitive regions", {}, "#1f77b4"};
    for (const EpisodeLog& e : result.log.episodes) {
      reward.values.push_back(e.total_reward);
      sensitive.values.push_back(e.sensitive);
    }
    svg_line_chart({reward, sensitive}, "training convergence", "episode",
                   (fs::path(out_dir) / "training_curves.svg").string());

    outputs.insert(outputs.begin(),
                   {"model.json", "training_log.csv", "training_curves.svg"});
    write_manifest(out_dir, "train", cfg, outputs, std::nullopt);
  });
}

int cmd_generate(const ToolkitConfig& cfg, const std::string& model_file,
                 const std::string& domain_file, const std::string& mode,
                 const std::string& out_dir) {
  return guarded("generate", [&] {
    ModelFile model = load_model(model_file);
    if (model.net.input_dim() != kObservationDim)
      throw std::runtime_error(
          "model input dimension " + std::to_string(model.net.input_dim()) +
          " does not match observation dimension " +
          std::to_string(kObservationDim));
    DomainFile dom = load_domain(domain_file);
    fs::create_directories(out_dir);
    std::vector<std::string> outputs;

    Toolpath path;
    if (mode == "direct") {
      ScanEnv env(make_grid(cfg, dom.domain), cfg.env_config());
      path = greedy_rollout(model.net, env);
    } else if (mode == "voronoi-island") {
      Rng rng(cfg.learner.seed);
      IslandPlan plan = plan_voronoi_islands(
          dom.domain, cfg.pathplan.island_mm, model.net, cfg.hatch_mm(),
          cfg.env_config(), cfg.pathplan.voronoi_random_seeds, rng,
          cfg.pathplan.sequence_lambda);
      path = plan.merged;
      nlohmann::json pj;
      pj["island_size_mm"] = plan.islands.size;
      pj["order"] = plan.order;
      nlohmann::json cents = nlohmann::json::array();
      for (const Vec2& c : plan.islands.centroids)
        cents.push_back({c.x, c.y});
      pj["centroids_mm"] = std::move(cents);
      pj["warnings"] = plan.warnings;
      std::ofstream pout(fs::path(out_dir) / "island_plan.json");
      pout << pj.dump(2) << "\n";
      outputs.push_back("island_plan.json");
    } else {
      throw std::runtime_error("mode must be direct or voronoi-island, got " +
                               mode);
    }

    path.save((fs::path(out_dir) / "toolpath.json").string());
    svg_toolpath(path, (fs::path(out_dir) / "toolpath.svg").string());
    outputs.insert(outputs.begin(), {"toolpath.json", "toolpath.svg"});
    write_manifest(out_dir, "generate", cfg, outputs, std::nullopt);
  });
}

int cmd_baseline(const ToolkitConfig& cfg, const std::string& domain_file,
                 const std::string& strategy, const std::string& out_dir) {
  return guarded("baseline", [&] {
    DomainFile dom = load_domain(domain_file);
    fs::create_directories(out_dir);
    Toolpath path = baseline_path(cfg, make_grid(cfg, dom.domain), strategy);
    path.save((fs::path(out_dir) / "toolpath.json").string());
    svg_toolpath(path, (fs::path(out_dir) / "toolpath.svg").string());
    write_manifest(out_dir, "baseline", cfg, {"toolpath.json", "toolpath.svg"},
                   std::nullopt);
  });
}

int cmd_compare(const ToolkitConfig& cfg, const std::string& domain_file,
                const std::vector<std::string>& strategies,
                const std::string& model_file, const std::string& out_dir) {
  return guarded("compare", [&] {
    if (strategies.size() < 2)
      throw std::runtime_error("compare needs at least 2 strategies");
    DomainFile dom = load_domain(domain_file);
    std::optional<ModelFile> model;
    for (const std::string& s : strategies)
      if (s == "dqn" && !model) {
        if (model_file.empty())
          throw std::runtime_error("strategy dqn requires --model");
        model = load_model(model_file);
      }
    fs::create_directories(out_dir);
    SampleGrid grid = make_grid(cfg, dom.domain);

    double absorptivity = ensure_absorptivity(cfg);
    LaserParams laser = cfg.laser();
    laser.absorptivity = absorptivity;
    MaterialParams mat = cfg.material();
    SimParams sim = cfg.sim();

    std::vector<std::string> outputs;
    std::vector<DepthOverlaySeries> overlay;
    const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                            "#8c564b"};
    std::string summary =
        "strategy,avg_um,peak_um,sensitive_regions,void_moves,length_mm\n";
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      const std::string& s = strategies[i];
      Toolpath path;
      if (s == "dqn") {
        ScanEnv env(grid, cfg.env_config());
        path = greedy_rollout(model->net, env);
      } else {
        path = baseline_path(cfg, grid, s);
      }
      MeltPoolTrace trace = simulate_trace(path, mat, laser, sim);
      DepthStats stats = depth_stats(trace);
      SensitiveRegions sens = detect_sensitive_regions(path, cfg.env.sensitive_coeff);

      std::string trace_name = "trace_" + s + ".csv";
      write_trace_csv(trace, (fs::path(out_dir) / trace_name).string());
      outputs.push_back(trace_name);

      char row[256];
      std::snprintf(row, sizeof(row), "%s,%.6g,%.6g,%d,%d,%.6g\n", s.c_str(),
                    stats.avg_um, stats.peak_um, sens.count,
                    path.void_move_count(), path.length());
      summary += row;

      DepthOverlaySeries series;
      series.name = s;
      series.color = colors[i % 5];
      series.avg_um = stats.avg_um;
      series.peak_um = stats.peak_um;
      for (const auto& st : trace.steps) series.depths_um.push_back(st.depth_um);
      overlay.push_back(std::move(series));
    }

    std::ofstream sout(fs::path(out_dir) / "summary.csv");
    sout << summary;
    sout.close();
    svg_depth_overlay(overlay, (fs::path(out_dir) / "depth_overlay.svg").string());
    outputs.insert(outputs.begin(), {"summary.csv", "depth_overlay.svg"});
    write_manifest(out_dir, "compare", cfg, outputs, absorptivity);
  });
}

int cmd_export_gcode(const std::string& toolpath_file,
                     const std::string& out_file) {
  return guarded("export-gcode", [&] {
    Toolpath path = Toolpath::load(toolpath_file);
    GCodeProgram prog = finetune_gcode(path);
    fs::path out(out_file);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    export_gcode(prog, out_file);

    ToolkitConfig cfg;
    cfg.geometry.hatch_um = path.hatch * 1000.0;
    std::string dir = out.has_parent_path() ? out.parent_path().string() : ".";
    write_manifest(dir, "export-gcode", cfg, {out.filename().string()},
                   std::nullopt);
  });
}

int cmd_angle_study(const ToolkitConfig& cfg, const std::string& out_dir,
                    const std::vector<double>& extra_angles) {
  return guarded("angle-study", [&] {
    fs::create_directories(out_dir);
    double absorptivity = ensure_absorptivity(cfg);
    LaserParams laser = cfg.laser();
    laser.absorptivity = absorptivity;

    std::vector<double> templates = template_angles();
    auto template_rows =
        angle_template_study(templates, cfg.material(), laser, cfg.sim());

    std::vector<double> sweep = templates;
    for (double a : extra_angles)
      if (std::find(sweep.begin(), sweep.end(), a) == sweep.end())
        sweep.push_back(a);
    std::sort(sweep.begin(), sweep.end());
    auto sweep_rows =
        angle_template_study(sweep, cfg.material(), laser, cfg.sim());

    auto write_rows = [&](const std::string& name,
                          const std::vector<std::pair<double, double>>& rows) {
      std::ofstream out(fs::path(out_dir) / name);
      out << "angle_deg,max_depth_um\n";
      char buf[80];
      for (const auto& [a, d] : rows) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g\n", a, d);
        out << buf;
      }
    };
    write_rows("angle_templates.csv", template_rows);
    write_rows("angle_sweep.csv", sweep_rows);
    svg_angle_depth(sweep_rows,
                    (fs::path(out_dir) / "angle_depth.svg").string());
    write_manifest(out_dir, "angle-study", cfg,
                   {"angle_templates.csv", "angle_sweep.csv", "angle_depth.svg"},
                   absorptivity);
  });
}

}  // namespace lpbf
