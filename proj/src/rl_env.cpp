#include "lpbf/rl_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lpbf {

TemperatureProxy::TemperatureProxy(int window, double sigma_mm, double tau_s)
    : window_(window), sigma_mm_(sigma_mm), tau_s_(tau_s) {
  if (window <= 0 || sigma_mm <= 0 || tau_s <= 0)
    throw std::invalid_argument("proxy parameters must be positive");
}

void TemperatureProxy::push(const Vec2& pos, double t) {
  if (static_cast<int>(pos_.size()) < window_) {
    pos_.push_back(pos);
    time_.push_back(t);
  } else {
    pos_[head_] = pos;
    time_[head_] = t;
    head_ = (head_ + 1) % pos_.size();
  }
}

double TemperatureProxy::value(const Vec2& candidate, double t) const {
  if (pos_.empty()) return 0.0;
  double wsum = 0.0, acc = 0.0;
  const double inv2s2 = 1.0 / (2.0 * sigma_mm_ * sigma_mm_);
  for (std::size_t i = 0; i < pos_.size(); ++i) {
    double w = std::exp(-(t - time_[i]) / tau_s_);
    wsum += w;
    acc += w * std::exp(-(candidate - pos_[i]).norm2() * inv2s2);
  }
  return acc / wsum;
}

void TemperatureProxy::clear() {
  pos_.clear();
  time_.clear();
  head_ = 0;
}

double reward_main(double alpha_deg, double d_mm, double hatch_mm,
                   double coeff) {
  if (alpha_deg < 0.0 || alpha_deg > 180.0)
    throw std::invalid_argument("turning angle outside [0, 180]");
  if (!(d_mm > 0.0)) throw std::invalid_argument("distance must be positive");
  if (alpha_deg < 90.0 && d_mm <= coeff * hatch_mm * (1.0 + 1e-12))
    return -hatch_mm / d_mm;
  return 0.0;
}

ScanEnv::ScanEnv(SampleGrid grid, EnvConfig cfg, int start)
    : grid_(std::move(grid)),
      cfg_(cfg),
      start_(start),
      proxy_(cfg.proxy_window, cfg.proxy_sigma * grid_.hatch,
             cfg.proxy_tau * grid_.hatch / cfg.velocity) {
  if (start_ < 0 || start_ >= grid_.size())
    throw std::invalid_argument("start index out of range");
  cell_diag_.assign(static_cast<std::size_t>(std::max(grid_.rows - 1, 1)) *
                        std::max(grid_.cols - 1, 1),
                    0);
  gate_mm_ = cfg_.sensitive_coeff * grid_.hatch;
  reset(true);
}

void ScanEnv::reset(bool clear_collisions) {
  grid_.reset_visited();
  if (clear_collisions)
    std::fill(grid_.collisions.begin(), grid_.collisions.end(), 0);
  std::fill(cell_diag_.begin(), cell_diag_.end(), std::uint8_t{0});
  state_ = AgentState{};
  state_.current = start_;
  grid_.visited[start_] = 1;
  unvisited_ = grid_.size() - 1;
  done_ = unvisited_ == 0;
  proxy_.clear();
  moves_.clear();
  moves_.push_back({start_, point(start_), false});
  episode_reward_ = 0.0;
  sensitive_count_ = 0;
  collision_count_ = 0;
  isolated_count_ = 0;
  refresh();
}

std::vector<int> ScanEnv::legal_moves() const {
  std::vector<int> out;
  const int r = grid_.point_row[state_.current];
  const int c = grid_.point_col[state_.current];
  const Vec2 cp = point(state_.current);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      int idx = grid_.index_of_cell(r + dr, c + dc);
      if (idx < 0 || grid_.visited[idx]) continue;
      if (state_.prev_dir) {
        Vec2 u = (point(idx) - cp).normalized();
        if (dot(u, *state_.prev_dir) < -1.0 + 1e-9) continue;  // backtrack
      }
      out.push_back(idx);
    }
  }
  return out;
}

bool ScanEnv::diagonal_blocked(int from, int to) const {
  int r0 = grid_.point_row[from], c0 = grid_.point_col[from];
  int r1 = grid_.point_row[to], c1 = grid_.point_col[to];
  if (std::abs(r1 - r0) != 1 || std::abs(c1 - c0) != 1) return false;
  int cell_r = std::min(r0, r1), cell_c = std::min(c0, c1);
  std::uint8_t bits =
      cell_diag_[static_cast<std::size_t>(cell_r) * (grid_.cols - 1) + cell_c];
  // "/" runs lower-left to upper-right; crossing requires the other one
  bool is_slash = (r1 - r0) == (c1 - c0);
  return is_slash ? (bits & 2) != 0 : (bits & 1) != 0;
}

void ScanEnv::mark_laser_segment(int from, int to) {
  int r0 = grid_.point_row[from], c0 = grid_.point_col[from];
  int r1 = grid_.point_row[to], c1 = grid_.point_col[to];
  if (std::abs(r1 - r0) != 1 || std::abs(c1 - c0) != 1) return;
  int cell_r = std::min(r0, r1), cell_c = std::min(c0, c1);
  bool is_slash = (r1 - r0) == (c1 - c0);
  cell_diag_[static_cast<std::size_t>(cell_r) * (grid_.cols - 1) + cell_c] |=
      is_slash ? 1 : 2;
}

bool ScanEnv::would_collide(int target) const {
  if (grid_.visited[target]) return true;
  return diagonal_blocked(state_.current, target);
}

int ScanEnv::nearest_fallback() const {
  if (unvisited_ == 0)
    throw std::logic_error("nearest_fallback: all points visited");
  const Vec2 cp = point(state_.current);
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_.size(); ++i) {
    if (grid_.visited[i]) continue;
    double d = distance(cp, point(i));
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  // Eq.-13 constraint h <= d <= L holds by construction on the lattice
  if (best_d < grid_.hatch * (1.0 - 1e-9) ||
      best_d > grid_.max_length * (1.0 + 1e-9))
    throw std::logic_error("fallback distance outside [h, L]");
  return best;
}

void ScanEnv::refresh() {
  std::vector<int> legal = legal_moves();
  const Vec2 cp = point(state_.current);

  struct Scored {
    int target;
    double alpha;
    double proxy;
  };
  std::vector<Scored> scored;
  scored.reserve(legal.size());
  for (int idx : legal) {
    Vec2 dir = (point(idx) - cp).normalized();
    double alpha =
        state_.prev_dir ? turning_angle_deg(*state_.prev_dir, dir) : 180.0;
    scored.push_back({idx, alpha, proxy_.value(point(idx), state_.time)});
  }

  actions_ = {CandidateAction{Strategy::MinTemp},
              CandidateAction{Strategy::Smoothest},
              CandidateAction{Strategy::SecondSmoothest}};
  if (!scored.empty()) {
    auto by_proxy = std::min_element(
        scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
          if (a.proxy != b.proxy) return a.proxy < b.proxy;
          return a.target < b.target;
        });
    std::vector<Scored> by_alpha = scored;
    std::sort(by_alpha.begin(), by_alpha.end(),
              [](const Scored& a, const Scored& b) {
                if (a.alpha != b.alpha) return a.alpha > b.alpha;
                return a.target < b.target;
              });
    const Scored& second =
        by_alpha.size() > 1 ? by_alpha[1] : by_alpha[0];
    auto fill = [&](CandidateAction& act, const Scored& s) {
      act.target = s.target;
      act.alpha_deg = s.alpha;
      act.proxy = s.proxy;
      act.collision = would_collide(s.target);
    };
    fill(actions_[0], *by_proxy);
    fill(actions_[1], by_alpha[0]);
    fill(actions_[2], second);
  }

  // observation layout: pos(2) dir(2) remaining(1) 5x5 window(25)
  // alpha/180 (3) sensitive flag (3) proxy (3)
  Observation& o = obs_;
  o.v.fill(0.0);
  double w = std::max(grid_.domain_bbox.width(), 1e-12);
  double h = std::max(grid_.domain_bbox.height(), 1e-12);
  o.v[0] = std::clamp((cp.x - grid_.domain_bbox.min.x) / w, 0.0, 1.0);
  o.v[1] = std::clamp((cp.y - grid_.domain_bbox.min.y) / h, 0.0, 1.0);
  if (state_.prev_dir) {
    o.v[2] = state_.prev_dir->x;
    o.v[3] = state_.prev_dir->y;
  }
  o.v[4] = static_cast<double>(unvisited_) / grid_.size();
  int k = 5;
  const int cr = grid_.point_row[state_.current];
  const int cc = grid_.point_col[state_.current];
  for (int dr = -2; dr <= 2; ++dr) {
    for (int dc = -2; dc <= 2; ++dc) {
      int idx = grid_.index_of_cell(cr + dr, cc + dc);
      o.v[k++] = (idx < 0 || grid_.visited[idx]) ? 1.0 : 0.0;
    }
  }
  for (int i = 0; i < 3; ++i) {
    const CandidateAction& a = actions_[i];
    if (a.target < 0) {  // worst-case padding for missing candidates
      o.v[30 + i] = 0.0;
      o.v[33 + i] = 1.0;
      o.v[36 + i] = 1.0;
      continue;
    }
    o.v[30 + i] = a.alpha_deg / 180.0;
    bool trigger = state_.prev_move_laser && a.alpha_deg < 90.0 &&
                   state_.last_sensitive_arc &&
                   state_.arc - *state_.last_sensitive_arc <=
                       gate_mm_ * (1.0 + 1e-12);
    o.v[33 + i] = trigger ? 1.0 : 0.0;
    o.v[36 + i] = std::clamp(a.proxy, 0.0, 1.0);
  }
}

StepOutcome ScanEnv::step(int action_index) {
  if (done_) throw std::logic_error("step called on finished episode");
  if (action_index < 0 || action_index > 2)
    throw std::invalid_argument("action index must be 0, 1 or 2");

  const int from = state_.current;
  const Vec2 fp = point(from);
  StepOutcome out;

  int target;
  bool laser;
  if (actions_[action_index].target < 0) {  // unqualified point
    target = nearest_fallback();
    laser = false;
    out.unqualified = true;
  } else {
    target = actions_[action_index].target;
    out.collided = would_collide(target);
    laser = !out.collided;
  }

  const Vec2 tp = point(target);
  const Vec2 dir = (tp - fp).normalized();
  const double len = distance(fp, tp);
  const double alpha =
      state_.prev_dir ? turning_angle_deg(*state_.prev_dir, dir) : 180.0;

  RewardBreakdown reward;
  // Eq. 9: a sharp laser-on turn following a laser-on segment is sensitive
  if (laser && state_.prev_move_laser && alpha < 90.0) {
    double d = state_.last_sensitive_arc
                   ? state_.arc - *state_.last_sensitive_arc
                   : std::numeric_limits<double>::infinity();
    reward.r_t = reward_main(alpha, d, grid_.hatch, cfg_.sensitive_coeff);
    if (reward.r_t < 0.0) ++sensitive_count_;
    state_.last_sensitive_arc = state_.arc;
  }

  // the threshold judgment happens on the collision event itself, against
  // the counter accumulated over the whole training run
  if (out.collided) {
    ++grid_.collisions[from];
    ++collision_count_;
    reward.n_c =
        collision_penalty(grid_.collisions[from], cfg_.collision_threshold);
  }

  bool from_isolated = state_.entered_by_void && !laser;
  if (from_isolated) ++isolated_count_;

  // execute the move
  grid_.visited[target] = 1;
  --unvisited_;
  moves_.push_back({target, tp, laser});
  if (laser) {
    mark_laser_segment(from, target);
    proxy_.push(tp, state_.time + len / cfg_.velocity);
  }
  state_.arc += len;
  state_.time += len / cfg_.velocity;
  ++state_.steps;
  state_.current = target;
  state_.prev_dir = dir;
  state_.prev_move_laser = laser;
  state_.entered_by_void = !laser;
  state_.entered_by_fallback = out.unqualified;
  done_ = unvisited_ == 0;

  bool terminal_isolated = done_ && out.unqualified;
  if (terminal_isolated) ++isolated_count_;
  reward.n_i = isolated_penalty(from_isolated || terminal_isolated);

  episode_reward_ += reward.total();

  if (!done_) refresh();
  out.obs = obs_;
  out.reward = reward;
  out.done = done_;
  out.moved_to = target;
  out.laser_on = laser;
  return out;
}

Toolpath ScanEnv::path() const {
  Toolpath p;
  p.hatch = grid_.hatch;
  p.generator = "dqn-env";
  p.moves = moves_;
  return p;
}

}  // namespace lpbf
