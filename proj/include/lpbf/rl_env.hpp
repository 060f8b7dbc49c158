#pragma once

#include <array>
#include <optional>
#include <vector>

#include "lpbf/toolpath.hpp"

namespace lpbf {

struct EnvConfig {
  double sensitive_coeff = 3.0;   // Eq.-9 distance gate, in hatches
  int collision_threshold = 3;    // collisions tolerated per point
  int proxy_window = 64;          // melt-history points kept for the proxy
  double proxy_sigma = 2.0;       // proxy distance scale, in hatches
  double proxy_tau = 64.0;        // proxy time scale, in hatch traversals
  double velocity = 1000.0;       // mm/s, scan speed for time bookkeeping
};

// Time-weighted Gaussian heat proxy over the most recent melted points:
// F = sum_i w_i(t) * exp(-d_i^2 / (2 sigma^2)), weights normalized to 1.
class TemperatureProxy {
 public:
  TemperatureProxy(int window, double sigma_mm, double tau_s);

  void push(const Vec2& pos, double t);
  double value(const Vec2& candidate, double t) const;
  int size() const { return static_cast<int>(pos_.size()); }
  void clear();

 private:
  int window_;
  double sigma_mm_, tau_s_;
  std::vector<Vec2> pos_;
  std::vector<double> time_;
  std::size_t head_ = 0;
};

enum class Strategy { MinTemp = 0, Smoothest = 1, SecondSmoothest = 2 };

struct CandidateAction {
  Strategy strategy = Strategy::MinTemp;
  int target = -1;  // -1 when no legal move exists
  double alpha_deg = 180.0;
  double proxy = 0.0;
  bool collision = false;
};

struct RewardBreakdown {
  double r_t = 0.0;  // main term, <= 0
  int n_c = 0;
  int n_i = 0;
  double total() const { return r_t - n_c - n_i; }
};

// Eq.-9 main term: -h/d for a sharp turn (alpha < 90) within coeff*h of the
// previous one, else 0. d may be +infinity when no previous sharp turn exists.
double reward_main(double alpha_deg, double d_mm, double hatch_mm,
                   double coeff = 3.0);

inline int collision_penalty(int n, int threshold = 3) {
  return n > threshold ? 1 : 0;
}

inline int isolated_penalty(bool isolated) { return isolated ? 1 : 0; }

struct AgentState {
  int current = 0;
  std::optional<Vec2> prev_dir;  // unit vector of the last move
  int steps = 0;
  double time = 0.0;  // s
  double arc = 0.0;   // mm of path generated so far
  std::optional<double> last_sensitive_arc;
  bool prev_move_laser = false;
  bool entered_by_void = false;
  bool entered_by_fallback = false;
};

inline constexpr int kObservationDim = 39;

struct Observation {
  std::array<double, kObservationDim> v{};
};

struct StepOutcome {
  Observation obs;
  RewardBreakdown reward;
  bool done = false;
  int moved_to = -1;
  bool laser_on = true;
  bool unqualified = false;
  bool collided = false;
};

// Episode environment over a sample grid. Single-threaded; independent
// instances may run in parallel.
class ScanEnv {
 public:
  ScanEnv(SampleGrid grid, EnvConfig cfg, int start = 0);

  // Clears episode state. Collision counters persist across episodes of a
  // training run unless clear_collisions is set.
  void reset(bool clear_collisions = false);

  const SampleGrid& grid() const { return grid_; }
  const AgentState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }
  bool done() const { return done_; }

  // Unvisited Moore neighbors, excluding the exact-backtrack direction.
  std::vector<int> legal_moves() const;

  // Candidate segment current->target: true iff the target is already
  // visited or the segment crosses a prior laser-on segment.
  bool would_collide(int target) const;

  int nearest_fallback() const;

  const std::array<CandidateAction, 3>& actions() const { return actions_; }
  const Observation& observation() const { return obs_; }

  StepOutcome step(int action_index);

  Toolpath path() const;
  double episode_reward() const { return episode_reward_; }
  int sensitive_count() const { return sensitive_count_; }
  int collision_count() const { return collision_count_; }
  int isolated_count() const { return isolated_count_; }
  int unvisited_count() const { return unvisited_; }

 private:
  void refresh();  // recompute legal moves, candidates and observation
  Vec2 point(int idx) const { return grid_.points[idx]; }
  bool diagonal_blocked(int from, int to) const;
  void mark_laser_segment(int from, int to);

  SampleGrid grid_;
  EnvConfig cfg_;
  int start_;
  AgentState state_;
  bool done_ = false;
  int unvisited_ = 0;
  double gate_mm_ = 0.0;

  TemperatureProxy proxy_;
  std::array<CandidateAction, 3> actions_{};
  Observation obs_{};
  std::vector<Move> moves_;
  std::vector<std::uint8_t> cell_diag_;  // per lattice cell: bit0 "/", bit1 "\"

  double episode_reward_ = 0.0;
  int sensitive_count_ = 0;
  int collision_count_ = 0;
  int isolated_count_ = 0;
};

}  // namespace lpbf
