#include "lpbf/dqn.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace lpbf {

void TrainConfig::validate() const {
  if (discount < 0.0 || discount >= 1.0)
    throw std::invalid_argument("discount must be in [0, 1)");
  if (batch_size <= 0 || batch_size > replay_capacity)
    throw std::invalid_argument("batch size must fit the replay capacity");
  if (learning_rate <= 0.0 || target_sync <= 0 || episodes <= 0)
    throw std::invalid_argument("invalid training configuration");
}

QNetwork QNetwork::init(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("network needs >= 2 dims");
  QNetwork net;
  net.dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    Eigen::VectorXd b(dims[l + 1]);
    for (int r = 0; r < b.size(); ++r) b(r) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input) const {
  if (input.size() != input_dim())
    throw std::invalid_argument("observation dimension mismatch");
  Eigen::VectorXd a = input;
  for (int l = 0; l < num_layers(); ++l) {
    a = (weights[l] * a + biases[l]).eval();
    if (l + 1 < num_layers()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim())
    throw std::invalid_argument("observation dimension mismatch");
  Eigen::MatrixXd a = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    a = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < num_layers()) a = a.cwiseMax(0.0);
  }
  return a;
}

ReplayMemory::ReplayMemory(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("replay capacity must be > 0");
  data_.reserve(capacity);
}

void ReplayMemory::push(Transition t) {
  if (size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
    next_ = (next_ + 1) % data_.size();
  }
}

std::vector<int> ReplayMemory::sample_indices(int batch, Rng& rng) const {
  if (size() == 0) throw std::logic_error("sampling from empty replay");
  std::vector<int> out(batch);
  for (int i = 0; i < batch; ++i) out[i] = rng.uniform_int(size());
  return out;
}

double epsilon_for_episode(int episode, const TrainConfig& cfg) {
  if (episode < 0) throw std::invalid_argument("episode must be >= 0");
  return cfg.epsilon_final +
         (cfg.epsilon_start - cfg.epsilon_final) *
             std::exp(-static_cast<double>(episode) / cfg.epsilon_decay);
}

double bellman_target(double reward, const Eigen::VectorXd& q_next,
                      bool terminal, double discount) {
  if (terminal) return reward;
  return reward + discount * q_next.maxCoeff();
}

Optimizer Optimizer::for_network(const QNetwork& net) {
  Optimizer opt;
  for (int l = 0; l < net.num_layers(); ++l) {
    opt.mw.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(),
                                           net.weights[l].cols()));
    opt.vw.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(),
                                           net.weights[l].cols()));
    opt.mb.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    opt.vb.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return opt;
}

Eigen::VectorXd observation_vector(const Observation& obs) {
  return Eigen::Map<const Eigen::VectorXd>(obs.v.data(), kObservationDim);
}

double loss_and_gradients(const QNetwork& net, const QNetwork& target_net,
                          const ReplayMemory& replay,
                          const std::vector<int>& batch, double discount,
                          Gradients& out) {
  const int b = static_cast<int>(batch.size());
  if (b == 0) throw std::invalid_argument("empty minibatch");
  const int in = net.input_dim();

  Eigen::MatrixXd xs(in, b), xs_next(in, b);
  for (int i = 0; i < b; ++i) {
    const Transition& t = replay[batch[i]];
    xs.col(i) = observation_vector(t.s);
    xs_next.col(i) = observation_vector(t.s_next);
  }

  Eigen::MatrixXd q_next = target_net.forward_batch(xs_next);
  Eigen::VectorXd targets(b);
  for (int i = 0; i < b; ++i) {
    const Transition& t = replay[batch[i]];
    targets(i) = t.terminal
                     ? t.reward
                     : t.reward + discount * q_next.col(i).maxCoeff();
  }

  // forward with cached pre-activations
  const int nl = net.num_layers();
  std::vector<Eigen::MatrixXd> zs(nl), as(nl + 1);
  as[0] = xs;
  for (int l = 0; l < nl; ++l) {
    zs[l] = (net.weights[l] * as[l]).colwise() + net.biases[l];
    as[l + 1] = (l + 1 < nl) ? zs[l].cwiseMax(0.0).eval() : zs[l];
  }

  double loss = 0.0;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(net.output_dim(), b);
  for (int i = 0; i < b; ++i) {
    const Transition& t = replay[batch[i]];
    double diff = as[nl](t.action, i) - targets(i);
    loss += diff * diff;
    delta(t.action, i) = 2.0 * diff / b;
  }
  loss /= b;

  out.dw.assign(nl, {});
  out.db.assign(nl, {});
  for (int l = nl - 1; l >= 0; --l) {
    out.dw[l] = delta * as[l].transpose();
    out.db[l] = delta.rowwise().sum();
    if (l > 0)
      delta = (net.weights[l].transpose() * delta)
                  .cwiseProduct((zs[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

double train_step(QNetwork& net, const QNetwork& target_net,
                  const ReplayMemory& replay, const std::vector<int>& batch,
                  const TrainConfig& cfg, Optimizer& opt) {
  Gradients g;
  double loss =
      loss_and_gradients(net, target_net, replay, batch, cfg.discount, g);
  if (!std::isfinite(loss))
    throw std::runtime_error("non-finite loss in train_step (batch size " +
                             std::to_string(batch.size()) + ")");

  if (!cfg.use_adam) {
    for (int l = 0; l < net.num_layers(); ++l) {
      net.weights[l] -= cfg.learning_rate * g.dw[l];
      net.biases[l] -= cfg.learning_rate * g.db[l];
    }
    return loss;
  }

  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++opt.t;
  double corr1 = 1.0 - std::pow(b1, static_cast<double>(opt.t));
  double corr2 = 1.0 - std::pow(b2, static_cast<double>(opt.t));
  for (int l = 0; l < net.num_layers(); ++l) {
    opt.mw[l] = b1 * opt.mw[l] + (1.0 - b1) * g.dw[l];
    opt.vw[l] = b2 * opt.vw[l] + (1.0 - b2) * g.dw[l].cwiseProduct(g.dw[l]);
    opt.mb[l] = b1 * opt.mb[l] + (1.0 - b1) * g.db[l];
    opt.vb[l] = b2 * opt.vb[l] + (1.0 - b2) * g.db[l].cwiseProduct(g.db[l]);
    net.weights[l] -=
        (cfg.learning_rate * (opt.mw[l] / corr1).array() /
         ((opt.vw[l] / corr2).array().sqrt() + eps))
            .matrix();
    net.biases[l] -=
        (cfg.learning_rate * (opt.mb[l] / corr1).array() /
         ((opt.vb[l] / corr2).array().sqrt() + eps))
            .matrix();
  }
  return loss;
}

void TrainingLog::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write training log: " + path);
  out << "episode,total_reward,sensitive_count,collisions,isolated,steps,"
         "epsilon,mean_loss\n";
  char buf[240];
  for (const EpisodeLog& e : episodes) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%d,%d,%d,%d,%.9g,%.9g\n",
                  e.episode, e.total_reward, e.sensitive, e.collisions,
                  e.isolated, e.steps, e.epsilon, e.mean_loss);
    out << buf;
  }
}

int greedy_action(const QNetwork& policy, const Observation& obs) {
  Eigen::VectorXd q = policy.forward(observation_vector(obs));
  int best = 0;
  for (int i = 1; i < q.size(); ++i)
    if (q(i) > q(best)) best = i;
  return best;
}

TrainResult train(ScanEnv& env, const TrainConfig& cfg,
                  const SnapshotFn& snapshot) {
  cfg.validate();
  if (env.grid().size() < 2)
    throw std::invalid_argument("training needs at least 2 grid points");

  Rng rng(cfg.seed);
  std::vector<int> dims;
  dims.push_back(kObservationDim);
  for (int h : cfg.hidden) dims.push_back(h);
  dims.push_back(3);

  QNetwork net = QNetwork::init(dims, rng);
  QNetwork target = net;
  Optimizer opt = Optimizer::for_network(net);
  ReplayMemory replay(cfg.replay_capacity);
  TrainingLog log;
  long global_step = 0;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    env.reset();
    double eps = epsilon_for_episode(ep, cfg);
    double loss_sum = 0.0;
    int loss_n = 0;
    while (!env.done()) {
      Observation obs = env.observation();
      int a = rng.uniform() < eps ? rng.uniform_int(3)
                                  : greedy_action(net, obs);
      StepOutcome out = env.step(a);
      replay.push({obs, a, out.reward.total(), out.obs, out.done});
      if (replay.size() >= cfg.batch_size) {
        std::vector<int> batch = replay.sample_indices(cfg.batch_size, rng);
        loss_sum += train_step(net, target, replay, batch, cfg, opt);
        ++loss_n;
      }
      ++global_step;
      if (global_step % cfg.target_sync == 0) target = net;
    }
    EpisodeLog el;
    el.episode = ep;
    el.total_reward = env.episode_reward();
    el.sensitive = env.sensitive_count();
    el.collisions = env.collision_count();
    el.isolated = env.isolated_count();
    el.steps = env.state().steps;
    el.epsilon = eps;
    el.mean_loss = loss_n ? loss_sum / loss_n : 0.0;
    log.episodes.push_back(el);
    if (snapshot) snapshot(ep + 1, net);
  }
  return {std::move(net), std::move(log)};
}

Toolpath greedy_rollout(const QNetwork& policy, ScanEnv& env) {
  env.reset(true);
  while (!env.done()) env.step(greedy_action(policy, env.observation()));
  Toolpath path = env.path();
  path.generator = "dqn";
  return path;
}

void save_model(const QNetwork& net, const TrainConfig& cfg,
                double calibrated_absorptivity, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["dims"] = net.dims;
  nlohmann::json ws = nlohmann::json::array();
  nlohmann::json bs = nlohmann::json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    std::vector<double> w;
    w.reserve(net.weights[l].size());
    for (int r = 0; r < net.weights[l].rows(); ++r)
      for (int c = 0; c < net.weights[l].cols(); ++c)
        w.push_back(net.weights[l](r, c));  // row-major
    ws.push_back(w);
    std::vector<double> b(net.biases[l].data(),
                          net.biases[l].data() + net.biases[l].size());
    bs.push_back(b);
  }
  j["weights"] = std::move(ws);
  j["biases"] = std::move(bs);
  j["config"] = {{"learning_rate", cfg.learning_rate},
                 {"discount", cfg.discount},
                 {"batch_size", cfg.batch_size},
                 {"target_sync", cfg.target_sync},
                 {"replay_capacity", cfg.replay_capacity},
                 {"epsilon_start", cfg.epsilon_start},
                 {"epsilon_final", cfg.epsilon_final},
                 {"epsilon_decay", cfg.epsilon_decay},
                 {"episodes", cfg.episodes},
                 {"seed", cfg.seed},
                 {"optimizer", cfg.use_adam ? "adam" : "sgd"}};
  j["calibration"] = {{"absorptivity", calibrated_absorptivity}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump() << "\n";
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt model file " + path + ": " + e.what());
  }
  if (j.value("version", -1) != 1)
    throw std::runtime_error("unsupported model file version in " + path);

  ModelFile m;
  m.net.dims = j.at("dims").get<std::vector<int>>();
  if (m.net.dims.size() < 2)
    throw std::runtime_error("model file has invalid dims");
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  if (ws.size() != m.net.dims.size() - 1 || bs.size() != ws.size())
    throw std::runtime_error("model file layer count mismatch");
  for (std::size_t l = 0; l + 1 < m.net.dims.size(); ++l) {
    int rows = m.net.dims[l + 1], cols = m.net.dims[l];
    std::vector<double> w = ws[l].get<std::vector<double>>();
    std::vector<double> b = bs[l].get<std::vector<double>>();
    if (static_cast<int>(w.size()) != rows * cols ||
        static_cast<int>(b.size()) != rows)
      throw std::runtime_error("model file dimension mismatch in layer " +
                               std::to_string(l));
    Eigen::MatrixXd wm(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) wm(r, c) = w[r * cols + c];
    m.net.weights.push_back(std::move(wm));
    m.net.biases.push_back(
        Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
  }
  if (j.contains("config")) {
    const auto& c = j["config"];
    m.config.learning_rate = c.value("learning_rate", 0.001);
    m.config.discount = c.value("discount", 0.99);
    m.config.batch_size = c.value("batch_size", 64);
    m.config.target_sync = c.value("target_sync", 80);
    m.config.replay_capacity = c.value("replay_capacity", 1000);
    m.config.epsilon_start = c.value("epsilon_start", 1.0);
    m.config.epsilon_final = c.value("epsilon_final", 0.0);
    m.config.epsilon_decay = c.value("epsilon_decay", 200.0);
    m.config.episodes = c.value("episodes", 1000);
    m.config.seed = c.value("seed", std::uint64_t{1});
    m.config.use_adam = c.value("optimizer", "adam") != std::string("sgd");
  }
  if (j.contains("calibration"))
    m.calibrated_absorptivity = j["calibration"].value("absorptivity", 0.0);
  return m;
}

}  // namespace lpbf
