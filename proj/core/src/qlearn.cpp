#include "c4q/qlearn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "c4q/errors.hpp"

namespace c4q {

void TrainingConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!std::isfinite(gamma) || gamma < 0.0) throw ConfigError("gamma must be finite and >= 0");
  if (batch_games < 1) throw ConfigError("batch_games must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(optimizer_step > 0.0) || !std::isfinite(optimizer_step)) throw ConfigError("optimizer_step must be > 0");
  if (minibatch < 1) throw ConfigError("minibatch must be >= 1");
}

double predict_value(const QNetwork& net, const Board& afterstate) { return net.predict(afterstate); }

ActionValues q_values(const QNetwork& net, const Board& state, int player) {
  if (is_terminal(outcome(state))) throw NoLegalMoves("q_values on a terminal position");
  ActionValues out;
  for (Action a : legal_actions(state)) out.emplace(a, net.predict(apply_action(state, a, player)));
  return out;
}

double q_target(double q_old, double reward, double bootstrap, bool terminal, const TrainingConfig& cfg) {
  double future = terminal ? 0.0 : cfg.gamma * bootstrap;
  return q_old + cfg.alpha * (reward + future - q_old);
}

std::vector<TrainingPair> compute_targets(const BatchBuffer& batch, const QNetwork& net, const TrainingConfig& cfg) {
  std::vector<TrainingPair> pairs;
  for (const auto& episode : batch) {
    for (const auto& t : episode.transitions) {
      double q_old = net.predict(t.afterstate);
      double bootstrap = 0.0;
      if (!t.terminal) {
        auto next = q_values(net, t.next_state, episode.agent);
        bootstrap = std::max_element(next.begin(), next.end(), [](const auto& a, const auto& b) {
                      return a.second < b.second;
                    })->second;
      }
      pairs.push_back({t.afterstate, q_target(q_old, t.reward, bootstrap, t.terminal, cfg)});
    }
  }
  return pairs;
}

Optimizer::Optimizer(OptimizerKind kind, double step) : kind_(kind), step_(step) {}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= step_ * grad[i];
    return;
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-7;
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    params[i] -= step_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
  }
}

std::vector<double> train_batch(QNetwork& net, std::span<const TrainingPair> pairs, const TrainingConfig& cfg,
                                Rng& rng) {
  Optimizer optimizer(cfg.optimizer, cfg.optimizer_step);
  return train_batch(net, pairs, cfg, rng, optimizer);
}

std::vector<double> train_batch(QNetwork& net, std::span<const TrainingPair> pairs, const TrainingConfig& cfg,
                                Rng& rng, Optimizer& optimizer) {
  if (pairs.empty()) throw ConfigError("train_batch needs at least one pair");
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(QNetwork::kParamCount);
  std::vector<double> trace;
  trace.reserve(cfg.epochs);
  auto params = net.params();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
      std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const auto& p = pairs[order[i]];
        total += net.accumulate_gradient(p.afterstate, p.target, grad);
      }
      double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= inv;
      optimizer.step(params, grad);
    }
    double mse = total / static_cast<double>(pairs.size());
    if (!std::isfinite(mse)) throw NonFiniteLoss("training loss became non-finite; lower optimizer_step");
    trace.push_back(mse);
  }
  return trace;
}

std::vector<double> train_on_batch(QNetwork& net, const BatchBuffer& batch, const TrainingConfig& cfg, Rng& rng,
                                   Optimizer& optimizer) {
  if (!cfg.refresh_targets) return train_batch(net, compute_targets(batch, net, cfg), cfg, rng, optimizer);
  TrainingConfig single = cfg;
  single.epochs = 1;
  std::vector<double> trace;
  for (int e = 0; e < cfg.epochs; ++e) trace.push_back(train_batch(net, compute_targets(batch, net, cfg), single, rng, optimizer).front());
  return trace;
}

void analytic_gradient(const QNetwork& net, const Board& board, double target, std::span<double> grad) {
  net.accumulate_gradient(board, target, grad);
}

double gradient_check(const QNetwork& net, const Board& board, double target, int samples, Rng& rng,
                      const GradientFn& gradient) {
  std::vector<double> analytic(QNetwork::kParamCount, 0.0);
  gradient(net, board, target, analytic);

  const auto& tensors = QNetwork::manifest();
  std::vector<std::size_t> picks;
  int per_tensor = std::max(1, samples / static_cast<int>(tensors.size()));
  for (const auto& t : tensors) {
    for (int i = 0; i < per_tensor; ++i) picks.push_back(t.offset + uniform_index(rng, t.size()));
  }
  while (static_cast<int>(picks.size()) < samples) picks.push_back(uniform_index(rng, QNetwork::kParamCount));

  constexpr double kStep = 1e-5;
  QNetwork probe = net;
  auto loss = [&] {
    double e = probe.predict(board) - target;
    return e * e;
  };
  double worst = 0.0;
  for (std::size_t idx : picks) {
    double saved = probe.params()[idx];
    probe.params()[idx] = saved + kStep;
    double up = loss();
    probe.params()[idx] = saved - kStep;
    double down = loss();
    probe.params()[idx] = saved;
    double numeric = (up - down) / (2.0 * kStep);
    double denom = std::max({std::abs(numeric), std::abs(analytic[idx]), 1e-7});
    worst = std::max(worst, std::abs(numeric - analytic[idx]) / denom);
  }
  return worst;
}

namespace {

constexpr char kMagic[4] = {'C', '4', 'Q', 'N'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(raw), std::end(raw));
  out.insert(out.end(), std::begin(raw), std::end(raw));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) throw FormatError("checkpoint truncated");
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(raw), std::end(raw));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const QNetwork& net) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kCheckpointVersion);
  const auto& tensors = QNetwork::manifest();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) put_le<std::uint32_t>(out, d);
  }
  for (double p : net.params()) put_le<double>(out, p);
  return out;
}

QNetwork load_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  for (char m : kMagic) {
    if (in.get<std::uint8_t>() != static_cast<std::uint8_t>(m)) throw FormatError("not a checkpoint (bad magic)");
  }
  auto version = in.get<std::uint8_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto& tensors = QNetwork::manifest();
  if (in.get<std::uint32_t>() != tensors.size()) throw FormatError("checkpoint tensor count mismatch");
  for (const auto& t : tensors) {
    if (in.get<std::uint32_t>() != t.dims.size()) throw FormatError("checkpoint rank mismatch for " + t.name);
    for (auto d : t.dims) {
      if (in.get<std::uint32_t>() != d) throw FormatError("checkpoint shape mismatch for " + t.name);
    }
  }
  QNetwork net;
  for (double& p : net.params()) p = in.get<double>();
  if (!in.done()) throw FormatError("trailing bytes after checkpoint");
  return net;
}

void save_checkpoint_file(const QNetwork& net, const std::string& path) {
  auto bytes = save_checkpoint(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

QNetwork load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_checkpoint(bytes);
}

}  // namespace c4q
