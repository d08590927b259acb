#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "c4q/board.hpp"
#include "c4q/negamax.hpp"
#include "c4q/policy.hpp"
#include "c4q/qlearn.hpp"
#include "c4q/qnetwork.hpp"
#include "c4q/qsim.hpp"

namespace c4q {

enum class Role { Player1, Player2 };
enum class PolicyKind { EpsilonGreedy, ClassicalTags, QuantumTags };

std::string_view to_string(Role r);
std::string_view to_string(PolicyKind p);
Role parse_role(std::string_view text);
PolicyKind parse_policy(std::string_view text);
inline int agent_player(Role r) { return r == Role::Player1 ? 1 : -1; }
inline bool uses_flags(PolicyKind p) { return p != PolicyKind::EpsilonGreedy; }

struct ExperimentConfig {
  Role role = Role::Player1;
  PolicyKind policy = PolicyKind::ClassicalTags;
  int train_episodes = 1800;
  int test_episodes = 1000;
  std::vector<std::uint64_t> seeds{1};
  NegamaxConfig negamax;
  TrainingConfig training;
  ReflectionConfig reflection;
  qsim::GroverConfig grover;
  TemperatureSchedule temperature;

  // Role-dependent defaults: 1800 episodes and delta 60 for player 1,
  // 3600 episodes and delta 120 for player 2.
  static ExperimentConfig defaults(Role role, PolicyKind policy);

  void validate() const;
};

struct RunMetrics {
  PolicyKind agent = PolicyKind::ClassicalTags;
  Role role = Role::Player1;
  std::uint64_t seed = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  double win_rate = 0.0;  // percent of test games won
  std::size_t states_explored = 0;
  std::optional<double> mean_iterations;
  std::vector<std::size_t> states_after_batch;
  std::vector<std::vector<double>> loss_traces;  // [batch][epoch]
  int test_episodes() const { return wins + draws + losses; }
};

// Iterations-to-flag with carry-over: a miss adds its iterations to the next
// selection's count until some selection hits a flagged action. A trailing
// unfinished run of misses is not counted.
class IterationsAccumulator {
 public:
  void add(const SelectionResult& r);
  std::size_t samples() const { return samples_; }
  std::optional<double> mean() const;

 private:
  long long pending_ = 0;
  long long total_ = 0;
  std::size_t samples_ = 0;
};

double mean_iterations(const std::vector<SelectionResult>& events);

// Agent move chooser: (state, q values) -> action.
using MoveChooser = std::function<Action(const Board&, const ActionValues&)>;

// Plays one game against Randomized Negamax. The agent plays `agent` (+1 or
// -1); player 1 always moves first. Transitions are appended to `episode`
// when non-null.
Outcome play_game(const QNetwork& net, int agent, const MoveChooser& choose, const NegamaxConfig& opponent,
                  Rng& opponent_rng, Episode* episode);

struct TrainResult {
  QNetwork net;
  FlagTable flags;
  RunMetrics metrics;
};

// Trains one agent for cfg.train_episodes in batches of
// cfg.training.batch_games. Deterministic in (cfg, seed).
TrainResult train_run(const ExperimentConfig& cfg, std::uint64_t seed);

struct TestCounts {
  int wins = 0;
  int draws = 0;
  int losses = 0;
};

// Greedy play (argmax Q, lowest column on ties) with exploration disabled.
TestCounts test_run(const QNetwork& net, const ExperimentConfig& cfg, std::uint64_t seed);

// train_run followed by test_run; fills the test part of the metrics.
TrainResult full_run(const ExperimentConfig& cfg, std::uint64_t seed);

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> std;  // sample (n - 1) deviation, absent for n < 2
  std::size_t count = 0;
  // Throws InsufficientRuns when fewer than two runs were aggregated.
  double std_dev() const;
};

struct AggregateReport {
  PolicyKind agent = PolicyKind::ClassicalTags;
  Role role = Role::Player1;
  std::size_t runs = 0;
  std::optional<MetricSummary> iterations;
  MetricSummary states_explored;
  MetricSummary win_rate;
  MetricSummary draws;
  MetricSummary losses;
};

MetricSummary summarize(const std::vector<double>& values);
// Throws InsufficientRuns on an empty list.
AggregateReport aggregate(const std::vector<RunMetrics>& runs);

// Result files. Headers are fixed.
inline constexpr std::string_view kRunsCsvHeader =
    "agent,role,seed,iterations_mean,states_explored,win_rate,draws,losses";
inline constexpr std::string_view kReportCsvHeader =
    "agent,role,runs,iterations_mean,iterations_std,states_explored_mean,states_explored_std,win_rate_mean,"
    "win_rate_std";
inline constexpr std::string_view kLossCsvHeader = "batch,epoch,mse";

void write_runs_csv(std::ostream& out, const std::vector<RunMetrics>& runs);
void write_run_row(std::ostream& out, const RunMetrics& run);
void write_loss_csv(std::ostream& out, const RunMetrics& run);
void write_report_csv(std::ostream& out, const std::vector<AggregateReport>& reports);
std::string report_json(const std::vector<AggregateReport>& reports);

// Runs (policy, seed) jobs on up to `jobs` threads. Results are returned in
// input order and do not depend on `jobs`.
struct RunJob {
  ExperimentConfig config;
  std::uint64_t seed = 0;
};
std::vector<TrainResult> run_jobs(const std::vector<RunJob>& jobs, unsigned threads,
                                  const std::function<void(const RunJob&, const RunMetrics&)>& on_done = {});

}  // namespace c4q
