#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lpbf/baselines.hpp"
#include "lpbf/commands.hpp"
#include "lpbf/config.hpp"
#include "lpbf/dqn.hpp"
#include "lpbf/pathplan.hpp"
#include "lpbf/thermal.hpp"

namespace py = pybind11;
using namespace lpbf;

namespace {

PolygonDomain domain_from(const std::vector<std::pair<double, double>>& verts) {
  Polygon poly;
  poly.reserve(verts.size());
  for (auto [x, y] : verts) poly.push_back({x, y});
  return PolygonDomain::from_vertices(poly);
}

SampleGrid grid_from(const std::vector<std::pair<double, double>>& verts,
                     double hatch_mm) {
  return sample_uniform(domain_from(verts), hatch_mm);
}

struct PyPolicy {
  QNetwork net;
  TrainConfig config;
  double absorptivity = 0.0;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DRL toolpath generation for laser powder bed fusion";

  py::class_<Move>(m, "Move")
      .def_readonly("point", &Move::point)
      .def_property_readonly("x", [](const Move& mv) { return mv.pos.x; })
      .def_property_readonly("y", [](const Move& mv) { return mv.pos.y; })
      .def_readonly("laser", &Move::laser);

  py::class_<Toolpath>(m, "Toolpath")
      .def_readonly("hatch_mm", &Toolpath::hatch)
      .def_readonly("generator", &Toolpath::generator)
      .def_readonly("moves", &Toolpath::moves)
      .def("length_mm", &Toolpath::length)
      .def("laser_length_mm", &Toolpath::laser_length)
      .def("void_move_count", &Toolpath::void_move_count)
      .def("to_json", &Toolpath::to_json)
      .def_static("from_json", &Toolpath::from_json)
      .def("sensitive_regions",
           [](const Toolpath& p, double coeff) {
             return detect_sensitive_regions(p, coeff).count;
           },
           py::arg("coeff") = 3.0);

  py::class_<SampleGrid>(m, "SampleGrid")
      .def_property_readonly("size", &SampleGrid::size)
      .def_readonly("hatch_mm", &SampleGrid::hatch)
      .def_property_readonly("points", [](const SampleGrid& g) {
        std::vector<std::pair<double, double>> out;
        out.reserve(g.points.size());
        for (const Vec2& p : g.points) out.emplace_back(p.x, p.y);
        return out;
      });

  m.def("sample_grid", &grid_from, py::arg("vertices"), py::arg("hatch_mm"),
        "Uniformly sample a polygon at the given hatch spacing");

  m.def("turning_angle_deg",
        [](std::pair<double, double> in_dir, std::pair<double, double> out_dir) {
          return turning_angle_deg({in_dir.first, in_dir.second},
                                   {out_dir.first, out_dir.second});
        });

  m.def("reward_main", &reward_main, py::arg("alpha_deg"), py::arg("d_mm"),
        py::arg("hatch_mm"), py::arg("coeff") = 3.0);
  m.def("collision_penalty", &collision_penalty, py::arg("n"),
        py::arg("threshold") = 3);
  m.def("isolated_penalty", &isolated_penalty);
  m.def("epsilon",
        [](int episode, double start, double final_, double decay) {
          TrainConfig cfg;
          cfg.epsilon_start = start;
          cfg.epsilon_final = final_;
          cfg.epsilon_decay = decay;
          return epsilon_for_episode(episode, cfg);
        },
        py::arg("episode"), py::arg("start") = 1.0, py::arg("final") = 0.0,
        py::arg("decay") = 200.0);
  m.def("bellman_target",
        [](double reward, const std::vector<double>& q_next, bool terminal,
           double discount) {
          Eigen::VectorXd q(q_next.size());
          for (std::size_t i = 0; i < q_next.size(); ++i) q(i) = q_next[i];
          return bellman_target(reward, q, terminal, discount);
        },
        py::arg("reward"), py::arg("q_next"), py::arg("terminal"),
        py::arg("discount") = 0.99);

  m.def("zigzag",
        [](const std::vector<std::pair<double, double>>& verts, double hatch) {
          return zigzag(grid_from(verts, hatch));
        },
        py::arg("vertices"), py::arg("hatch_mm"));
  m.def("chessboard",
        [](const std::vector<std::pair<double, double>>& verts, double hatch,
           double island_mm) {
          return chessboard(grid_from(verts, hatch), island_mm);
        },
        py::arg("vertices"), py::arg("hatch_mm"), py::arg("island_mm") = 5.0);
  m.def("atg_greedy",
        [](const std::vector<std::pair<double, double>>& verts, double hatch) {
          return atg_greedy(grid_from(verts, hatch), EnvConfig{});
        },
        py::arg("vertices"), py::arg("hatch_mm"));

  py::class_<PyPolicy>(m, "Policy")
      .def("rollout",
           [](const PyPolicy& p,
              const std::vector<std::pair<double, double>>& verts,
              double hatch) {
             ScanEnv env(grid_from(verts, hatch), EnvConfig{});
             return greedy_rollout(p.net, env);
           },
           py::arg("vertices"), py::arg("hatch_mm"))
      .def("save",
           [](const PyPolicy& p, const std::string& path) {
             save_model(p.net, p.config, p.absorptivity, path);
           })
      .def_static("load",
                  [](const std::string& path) {
                    ModelFile mf = load_model(path);
                    return PyPolicy{mf.net, mf.config,
                                    mf.calibrated_absorptivity};
                  })
      .def("q_values", [](const PyPolicy& p, const std::vector<double>& obs) {
        if (static_cast<int>(obs.size()) != p.net.input_dim())
          throw std::invalid_argument("observation dimension mismatch");
        Eigen::VectorXd x(obs.size());
        for (std::size_t i = 0; i < obs.size(); ++i) x(i) = obs[i];
        Eigen::VectorXd q = p.net.forward(x);
        return std::vector<double>(q.data(), q.data() + q.size());
      });

  m.def("train",
        [](const std::vector<std::pair<double, double>>& verts, double hatch,
           int episodes, std::uint64_t seed) {
          TrainConfig cfg;
          cfg.episodes = episodes;
          cfg.seed = seed;
          ScanEnv env(grid_from(verts, hatch), EnvConfig{});
          TrainResult result = train(env, cfg);
          return PyPolicy{std::move(result.policy), cfg, 0.0};
        },
        py::arg("vertices"), py::arg("hatch_mm"), py::arg("episodes"),
        py::arg("seed") = 1,
        "Train a DQN policy on a sampled domain");

  m.def("simulate_depths",
        [](const Toolpath& path, double absorptivity) {
          MaterialParams mat;
          LaserParams laser;
          laser.absorptivity = absorptivity;
          SimParams sim;
          MeltPoolTrace trace = simulate_trace(path, mat, laser, sim);
          std::vector<std::tuple<double, double, double, double>> out;
          out.reserve(trace.steps.size());
          for (const auto& st : trace.steps)
            out.emplace_back(st.time, st.pos.x, st.pos.y, st.depth_um);
          return out;
        },
        py::arg("toolpath"), py::arg("absorptivity") = 0.5,
        "Per-step melt depth along a toolpath (default SS316L material)");

  m.def("calibrate_absorptivity",
        [](double target_um) {
          MaterialParams mat;
          LaserParams laser;
          SimParams sim;
          return calibrate_absorptivity(mat, laser, sim, target_um);
        },
        py::arg("target_um") = 45.0);

  m.def("gcode_text",
        [](const Toolpath& path) { return finetune_gcode(path).to_text(); },
        py::arg("toolpath"),
        "Fine-tuned G-code for a toolpath (isolated points removed)");

  m.attr("OBSERVATION_DIM") = kObservationDim;
  m.attr("__version__") = kToolVersion;
}
