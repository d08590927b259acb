#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "c4q/board.hpp"
#include "c4q/qnetwork.hpp"
#include "c4q/rng.hpp"

namespace c4q {

enum class OptimizerKind { Sgd, Adam };

struct TrainingConfig {
  double alpha = 0.8;  // Q-learning step
  double gamma = 1.0;
  int batch_games = 300;
  int epochs = 5;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double optimizer_step = 3e-4;
  int minibatch = 32;
  // Recompute Q-learning targets before every epoch instead of once per batch.
  bool refresh_targets = true;
  std::uint64_t seed = 0;

  void validate() const;
};

// One agent decision. `next_state` is the position after the opponent's
// reply, or the afterstate itself when the agent's move ended the game.
struct Transition {
  Board state;
  Action action;
  Board afterstate;
  Board next_state;
  double reward = 0.0;
  bool terminal = false;
};

struct Episode {
  int agent = 1;
  std::vector<Transition> transitions;
};

using BatchBuffer = std::vector<Episode>;

struct TrainingPair {
  Board afterstate;
  double target = 0.0;
};

// Q(s, a) is the value of the afterstate reached by a.
double predict_value(const QNetwork& net, const Board& afterstate);

// Values of every legal afterstate. Throws NoLegalMoves on terminal boards.
ActionValues q_values(const QNetwork& net, const Board& state, int player);

// q_old + alpha * (reward + gamma * bootstrap - q_old); bootstrap ignored
// when terminal.
double q_target(double q_old, double reward, double bootstrap, bool terminal, const TrainingConfig& cfg);

// Q-learning targets computed once per batch:
//   target = q_old + alpha * (reward + gamma * max_a Q(next, a) - q_old)
// with the bootstrap term dropped on terminal transitions.
std::vector<TrainingPair> compute_targets(const BatchBuffer& batch, const QNetwork& net, const TrainingConfig& cfg);

// Parameter update rule. Adam keeps its moment estimates across calls so one
// instance should live for a whole run.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double step);
  void step(std::span<double> params, std::span<const double> grad);
  OptimizerKind kind() const { return kind_; }

 private:
  OptimizerKind kind_;
  double step_;
  std::vector<double> m_, v_;
  long long t_ = 0;
};

// Mini-batch gradient descent on squared error for cfg.epochs passes, reshuffling with
// `rng` each pass. Returns the mean squared error seen in each epoch.
// Throws NonFiniteLoss when the loss diverges.
std::vector<double> train_batch(QNetwork& net, std::span<const TrainingPair> pairs, const TrainingConfig& cfg,
                                Rng& rng, Optimizer& optimizer);
// Uses a fresh optimizer built from cfg.
std::vector<double> train_batch(QNetwork& net, std::span<const TrainingPair> pairs, const TrainingConfig& cfg,
                                Rng& rng);

// One training cycle on a finished batch: targets, then cfg.epochs passes.
// Returns the per-epoch loss trace.
std::vector<double> train_on_batch(QNetwork& net, const BatchBuffer& batch, const TrainingConfig& cfg, Rng& rng,
                                   Optimizer& optimizer);

using GradientFn = std::function<void(const QNetwork&, const Board&, double, std::span<double>)>;

// Analytic gradient of (predict - target)^2, added into the span.
void analytic_gradient(const QNetwork& net, const Board& board, double target, std::span<double> grad);

// Max relative error between `gradient` and central differences (step 1e-5)
// over `samples` parameters drawn across every tensor.
double gradient_check(const QNetwork& net, const Board& board, double target, int samples, Rng& rng,
                      const GradientFn& gradient = analytic_gradient);

// Binary checkpoint: "C4QN", version byte, tensor manifest, then
// little-endian float64 parameters. Throws FormatError on any mismatch.
inline constexpr std::uint8_t kCheckpointVersion = 1;
std::vector<std::uint8_t> save_checkpoint(const QNetwork& net);
QNetwork load_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint_file(const QNetwork& net, const std::string& path);
QNetwork load_checkpoint_file(const std::string& path);

}  // namespace c4q
