#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "lpbf/rl_env.hpp"
#include "lpbf/rng.hpp"

namespace lpbf {

// Fully connected value network: rectifier hidden layers, identity output,
// one Q value per strategy.
struct QNetwork {
  std::vector<int> dims;                 // {in, hidden..., out}
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;

  // uniform init scaled by fan-in, drawn from rng
  static QNetwork init(const std::vector<int>& dims, Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

struct Transition {
  Observation s;
  int action = 0;
  double reward = 0.0;
  Observation s_next;
  bool terminal = false;
};

class ReplayMemory {
 public:
  explicit ReplayMemory(int capacity);

  void push(Transition t);  // oldest evicted first
  int size() const { return static_cast<int>(data_.size()); }
  int capacity() const { return capacity_; }
  std::vector<int> sample_indices(int batch, Rng& rng) const;
  const Transition& operator[](int i) const { return data_[i]; }

 private:
  int capacity_;
  std::vector<Transition> data_;
  std::size_t next_ = 0;
};

struct TrainConfig {
  double learning_rate = 0.001;
  double discount = 0.99;
  int batch_size = 64;
  int target_sync = 80;  // environment steps between target-network copies
  int replay_capacity = 1000;
  double epsilon_start = 1.0;
  double epsilon_final = 0.0;
  double epsilon_decay = 200.0;
  int episodes = 1000;
  std::uint64_t seed = 1;
  std::vector<int> hidden = {128, 128};
  bool use_adam = true;  // false: plain SGD

  void validate() const;
};

// Eq. 12 exponential decay
double epsilon_for_episode(int episode, const TrainConfig& cfg);

double bellman_target(double reward, const Eigen::VectorXd& q_next,
                      bool terminal, double discount);

// Adam moments (unused when plain SGD is selected).
struct Optimizer {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;

  static Optimizer for_network(const QNetwork& net);
};

struct Gradients {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
};

// MSE loss and gradients of one minibatch against gradient-stopped targets.
double loss_and_gradients(const QNetwork& net, const QNetwork& target_net,
                          const ReplayMemory& replay,
                          const std::vector<int>& batch, double discount,
                          Gradients& out);

// One optimizer update; returns the pre-update loss.
double train_step(QNetwork& net, const QNetwork& target_net,
                  const ReplayMemory& replay, const std::vector<int>& batch,
                  const TrainConfig& cfg, Optimizer& opt);

struct EpisodeLog {
  int episode = 0;
  double total_reward = 0.0;
  int sensitive = 0;
  int collisions = 0;
  int isolated = 0;
  int steps = 0;
  double epsilon = 0.0;
  double mean_loss = 0.0;
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;
  void save_csv(const std::string& path) const;
};

struct TrainResult {
  QNetwork policy;
  TrainingLog log;
};

using SnapshotFn = std::function<void(int episode, const QNetwork& net)>;

// Algorithm-1 loop: epsilon-greedy episodes, replay updates once the buffer
// holds a full batch, target sync every cfg.target_sync environment steps.
// Deterministic for a fixed seed and config.
TrainResult train(ScanEnv& env, const TrainConfig& cfg,
                  const SnapshotFn& snapshot = {});

// epsilon = 0 episode on a fresh environment; includes void moves.
Toolpath greedy_rollout(const QNetwork& policy, ScanEnv& env);

int greedy_action(const QNetwork& policy, const Observation& obs);

Eigen::VectorXd observation_vector(const Observation& obs);

void save_model(const QNetwork& net, const TrainConfig& cfg,
                double calibrated_absorptivity, const std::string& path);

struct ModelFile {
  QNetwork net;
  TrainConfig config;
  double calibrated_absorptivity = 0.0;  // 0 when absent
};

ModelFile load_model(const std::string& path);

}  // namespace lpbf
