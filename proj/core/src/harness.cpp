#include "c4q/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "c4q/errors.hpp"

namespace c4q {

std::string_view to_string(Role r) { return r == Role::Player1 ? "player1" : "player2"; }

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::EpsilonGreedy: return "epsilon_greedy";
    case PolicyKind::ClassicalTags: return "classical_tags";
    case PolicyKind::QuantumTags: return "quantum_tags";
  }
  return "classical_tags";
}

Role parse_role(std::string_view text) {
  if (text == "player1") return Role::Player1;
  if (text == "player2") return Role::Player2;
  throw ConfigError("unknown role '" + std::string(text) + "' (expected player1 or player2)");
}

PolicyKind parse_policy(std::string_view text) {
  if (text == "epsilon_greedy") return PolicyKind::EpsilonGreedy;
  if (text == "classical_tags") return PolicyKind::ClassicalTags;
  if (text == "quantum_tags") return PolicyKind::QuantumTags;
  throw ConfigError("unknown policy '" + std::string(text) +
                    "' (expected epsilon_greedy, classical_tags or quantum_tags)");
}

ExperimentConfig ExperimentConfig::defaults(Role role, PolicyKind policy) {
  ExperimentConfig cfg;
  cfg.role = role;
  cfg.policy = policy;
  cfg.train_episodes = role == Role::Player1 ? 1800 : 3600;
  cfg.temperature.delta = role == Role::Player1 ? 60.0 : 120.0;
  return cfg;
}

void ExperimentConfig::validate() const {
  negamax.validate();
  training.validate();
  reflection.validate();
  grover.validate();
  if (train_episodes < 0) throw ConfigError("train_episodes must be >= 0");
  if (test_episodes < 0) throw ConfigError("test_episodes must be >= 0");
  if (train_episodes % training.batch_games != 0) {
    throw ConfigError("train_episodes must be divisible by batch_games");
  }
  if (!(temperature.delta > 0.0)) throw ConfigError("temperature delta must be > 0");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw ConfigError("seeds must be distinct");
}

void IterationsAccumulator::add(const SelectionResult& r) {
  pending_ += r.iterations_used;
  if (r.flagged_hit) {
    total_ += pending_;
    pending_ = 0;
    ++samples_;
  }
}

std::optional<double> IterationsAccumulator::mean() const {
  if (samples_ == 0) return std::nullopt;
  return static_cast<double>(total_) / static_cast<double>(samples_);
}

double mean_iterations(const std::vector<SelectionResult>& events) {
  IterationsAccumulator acc;
  for (const auto& e : events) acc.add(e);
  return acc.mean().value_or(0.0);
}

Outcome play_game(const QNetwork& net, int agent, const MoveChooser& choose, const NegamaxConfig& opponent,
                  Rng& opponent_rng, Episode* episode) {
  if (episode) episode->agent = agent;
  Board state;
  if (agent == -1) state = apply_action(state, select_move(state, 1, opponent, opponent_rng), 1);
  for (;;) {
    ActionValues values = q_values(net, state, agent);
    Action a = choose(state, values);
    Board after = apply_action(state, a, agent);
    Outcome o = outcome(after);
    Board next = after;
    if (!is_terminal(o)) {
      next = apply_action(after, select_move(after, -agent, opponent, opponent_rng), -agent);
      o = outcome(next);
    }
    if (episode) {
      episode->transitions.push_back(Transition{state, a, after, next, reward(o, agent), is_terminal(o)});
    }
    if (is_terminal(o)) return o;
    state = next;
  }
}

TrainResult train_run(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  TrainResult result{QNetwork(derive_seed(seed, Stream::NetworkInit)), FlagTable{}, RunMetrics{}};
  RunMetrics& m = result.metrics;
  m.agent = cfg.policy;
  m.role = cfg.role;
  m.seed = seed;

  Rng opponent_rng = make_rng(seed, Stream::Opponent);
  Rng policy_rng = make_rng(seed, Stream::Policy);
  Rng shuffle_rng = make_rng(seed, Stream::Shuffle);
  NegamaxConfig opponent = cfg.negamax;

  std::unordered_set<StateKey> visited;
  IterationsAccumulator iterations;
  int episode_index = 0;  // 0-based count of completed training games

  MoveChooser choose = [&](const Board& state, const ActionValues& values) -> Action {
    visited.insert(state_key(state));
    if (cfg.policy == PolicyKind::EpsilonGreedy) {
      return epsilon_greedy_select(values, epsilon(episode_index + 1), policy_rng);
    }
    StateKey key = state_key(state);
    std::vector<Action> legal;
    for (const auto& [a, q] : values) legal.push_back(a);
    FlagSet flags = result.flags.get_flags(key, legal);
    ActionDistribution dist = boltzmann_distribution(values, temperature(episode_index, cfg.temperature));
    SelectionResult sel = cfg.policy == PolicyKind::ClassicalTags
                              ? classical_reflect_select(dist, flags, cfg.reflection, policy_rng)
                              : qsim::quantum_reflect_select(dist, flags, cfg.reflection, cfg.grover, policy_rng);
    iterations.add(sel);
    result.flags.update_flags(key, sel.action, values);
    return sel.action;
  };

  Optimizer optimizer(cfg.training.optimizer, cfg.training.optimizer_step);
  const int batches = cfg.train_episodes / cfg.training.batch_games;
  for (int b = 0; b < batches; ++b) {
    BatchBuffer buffer(static_cast<std::size_t>(cfg.training.batch_games));
    for (auto& episode : buffer) {
      play_game(result.net, agent_player(cfg.role), choose, opponent, opponent_rng, &episode);
      ++episode_index;
    }
    m.loss_traces.push_back(train_on_batch(result.net, buffer, cfg.training, shuffle_rng, optimizer));
    m.states_after_batch.push_back(visited.size());
  }
  m.states_explored = visited.size();
  if (uses_flags(cfg.policy)) m.mean_iterations = iterations.mean();
  return result;
}

TestCounts test_run(const QNetwork& net, const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.negamax.validate();
  TestCounts counts;
  Rng opponent_rng = make_rng(seed, Stream::TestOpponent);
  MoveChooser greedy = [](const Board&, const ActionValues& values) { return argmax(values); };
  const int agent = agent_player(cfg.role);
  for (int g = 0; g < cfg.test_episodes; ++g) {
    Outcome o = play_game(net, agent, greedy, cfg.negamax, opponent_rng, nullptr);
    double r = reward(o, agent);
    if (r > 0.75) {
      ++counts.wins;
    } else if (r > 0.0) {
      ++counts.draws;
    } else {
      ++counts.losses;
    }
  }
  return counts;
}

TrainResult full_run(const ExperimentConfig& cfg, std::uint64_t seed) {
  TrainResult result = train_run(cfg, seed);
  TestCounts counts = test_run(result.net, cfg, seed);
  RunMetrics& m = result.metrics;
  m.wins = counts.wins;
  m.draws = counts.draws;
  m.losses = counts.losses;
  m.win_rate = cfg.test_episodes > 0 ? 100.0 * counts.wins / cfg.test_episodes : 0.0;
  return result;
}

double MetricSummary::std_dev() const {
  if (!std) throw InsufficientRuns("standard deviation needs at least two runs");
  return *std;
}

MetricSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw InsufficientRuns("no runs to aggregate");
  MetricSummary s;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

AggregateReport aggregate(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw InsufficientRuns("no runs to aggregate");
  AggregateReport r;
  r.agent = runs.front().agent;
  r.role = runs.front().role;
  r.runs = runs.size();
  std::vector<double> iters, states, wins, draws, losses;
  for (const auto& m : runs) {
    if (m.mean_iterations) iters.push_back(*m.mean_iterations);
    states.push_back(static_cast<double>(m.states_explored));
    wins.push_back(m.win_rate);
    draws.push_back(m.draws);
    losses.push_back(m.losses);
  }
  if (!iters.empty()) r.iterations = summarize(iters);
  r.states_explored = summarize(states);
  r.win_rate = summarize(wins);
  r.draws = summarize(draws);
  r.losses = summarize(losses);
  return r;
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

nlohmann::json summary_json(const MetricSummary& s) {
  nlohmann::json j;
  j["mean"] = s.mean;
  j["std"] = s.std ? nlohmann::json(*s.std) : nlohmann::json(nullptr);
  j["count"] = s.count;
  return j;
}

}  // namespace

void write_run_row(std::ostream& out, const RunMetrics& m) {
  out << to_string(m.agent) << ',' << to_string(m.role) << ',' << m.seed << ',' << fmt(m.mean_iterations) << ','
      << m.states_explored << ',' << fmt(m.win_rate) << ',' << m.draws << ',' << m.losses << '\n';
}

void write_runs_csv(std::ostream& out, const std::vector<RunMetrics>& runs) {
  out << kRunsCsvHeader << '\n';
  for (const auto& m : runs) write_run_row(out, m);
}

void write_loss_csv(std::ostream& out, const RunMetrics& m) {
  out << kLossCsvHeader << '\n';
  for (std::size_t b = 0; b < m.loss_traces.size(); ++b) {
    for (std::size_t e = 0; e < m.loss_traces[b].size(); ++e) {
      out << b << ',' << e << ',' << fmt(m.loss_traces[b][e]) << '\n';
    }
  }
}

void write_report_csv(std::ostream& out, const std::vector<AggregateReport>& reports) {
  out << kReportCsvHeader << '\n';
  for (const auto& r : reports) {
    out << to_string(r.agent) << ',' << to_string(r.role) << ',' << r.runs << ',';
    if (r.iterations) {
      out << fmt(r.iterations->mean) << ',' << fmt(r.iterations->std);
    } else {
      out << ',';
    }
    out << ',' << fmt(r.states_explored.mean) << ',' << fmt(r.states_explored.std) << ',' << fmt(r.win_rate.mean)
        << ',' << fmt(r.win_rate.std) << '\n';
  }
}

std::string report_json(const std::vector<AggregateReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["agent"] = to_string(r.agent);
    j["role"] = to_string(r.role);
    j["runs"] = r.runs;
    nlohmann::json metrics;
    metrics["iterations_mean"] = r.iterations ? summary_json(*r.iterations) : nlohmann::json(nullptr);
    metrics["states_explored"] = summary_json(r.states_explored);
    metrics["win_rate"] = summary_json(r.win_rate);
    metrics["draws"] = summary_json(r.draws);
    metrics["losses"] = summary_json(r.losses);
    j["metrics"] = metrics;
    arr.push_back(j);
  }
  return arr.dump(2);
}

std::vector<TrainResult> run_jobs(const std::vector<RunJob>& jobs, unsigned threads,
                                  const std::function<void(const RunJob&, const RunMetrics&)>& on_done) {
  std::vector<std::optional<TrainResult>> slots(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        slots[i] = full_run(jobs[i].config, jobs[i].seed);
        if (on_done) {
          std::lock_guard lock(report_mutex);
          on_done(jobs[i], slots[i]->metrics);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<TrainResult> out;
  out.reserve(jobs.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace c4q
