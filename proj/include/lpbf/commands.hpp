#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpbf/config.hpp"
#include "lpbf/geometry.hpp"

namespace lpbf {

inline constexpr const char* kToolVersion = "0.1.0";

struct DomainFile {
  PolygonDomain domain;
  std::vector<Vec2> voronoi_seeds;  // optional, may be empty
};

DomainFile load_domain(const std::string& file);

// Each command validates inputs first, computes, writes its outputs and
// finally a run manifest listing them. Returns a process exit code.

int cmd_train(const ToolkitConfig& cfg, const std::string& domain_file,
              const std::string& out_dir);

int cmd_generate(const ToolkitConfig& cfg, const std::string& model_file,
                 const std::string& domain_file, const std::string& mode,
                 const std::string& out_dir);

int cmd_baseline(const ToolkitConfig& cfg, const std::string& domain_file,
                 const std::string& strategy, const std::string& out_dir);

int cmd_compare(const ToolkitConfig& cfg, const std::string& domain_file,
                const std::vector<std::string>& strategies,
                const std::string& model_file, const std::string& out_dir);

int cmd_export_gcode(const std::string& toolpath_file,
                     const std::string& out_file);

int cmd_angle_study(const ToolkitConfig& cfg, const std::string& out_dir,
                    const std::vector<double>& extra_angles = {
                        30.0, 45.0, 60.0, 80.0, 120.0, 150.0});

// The 8 lattice re-entry turning angles: 180, 135, 90, 45 and atan(1/k)
// for k = 2..5, in degrees.
std::vector<double> template_angles();

}  // namespace lpbf
