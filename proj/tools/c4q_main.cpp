#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "c4q/errors.hpp"
#include "c4q/harness.hpp"

namespace fs = std::filesystem;
using namespace c4q;

namespace {

// Flags shared by train/test/reproduce. Unset values keep the role defaults.
struct Overrides {
  std::string role = "player1";
  std::string policy = "classical_tags";
  std::optional<int> train_episodes, test_episodes, batch_games, depth, epochs, minibatch, r_max;
  std::optional<double> omega, alpha, gamma, optimizer_step, delta, eps_min;
  std::optional<std::string> optimizer, m_rule;
  std::optional<bool> refresh_targets;

  void add(CLI::App* app, bool with_policy) {
    app->add_option("--role", role, "player1 or player2")->check(CLI::IsMember({"player1", "player2"}));
    if (with_policy) {
      app->add_option("--policy", policy, "epsilon_greedy, classical_tags or quantum_tags")
          ->check(CLI::IsMember({"epsilon_greedy", "classical_tags", "quantum_tags"}));
    }
    app->add_option("--train-episodes", train_episodes, "training games (multiple of --batch-games)");
    app->add_option("--test-episodes", test_episodes, "greedy test games");
    app->add_option("--batch-games", batch_games, "games per training batch");
    app->add_option("--depth", depth, "opponent search depth");
    app->add_option("--omega", omega, "opponent random-move probability");
    app->add_option("--alpha", alpha, "Q-learning step");
    app->add_option("--gamma", gamma, "discount");
    app->add_option("--epochs", epochs, "epochs per batch");
    app->add_option("--minibatch", minibatch, "minibatch size");
    app->add_option("--optimizer", optimizer, "sgd or adam")->check(CLI::IsMember({"sgd", "adam"}));
    app->add_option("--optimizer-step", optimizer_step, "optimizer learning rate");
    app->add_option("--refresh-targets", refresh_targets, "recompute targets every epoch (true/false)");
    app->add_option("--delta", delta, "temperature schedule scale");
    app->add_option("--r-max", r_max, "reflection rounds per selection");
    app->add_option("--eps-min", eps_min, "flagged-mass floor for Grover repetitions");
    app->add_option("--m-rule", m_rule, "uniform_integer or floor_uniform_real")
        ->check(CLI::IsMember({"uniform_integer", "floor_uniform_real"}));
  }

  ExperimentConfig build(PolicyKind p) const {
    auto cfg = ExperimentConfig::defaults(parse_role(role), p);
    if (train_episodes) cfg.train_episodes = *train_episodes;
    if (test_episodes) cfg.test_episodes = *test_episodes;
    if (batch_games) cfg.training.batch_games = *batch_games;
    if (depth) cfg.negamax.depth = *depth;
    if (omega) cfg.negamax.omega = *omega;
    if (alpha) cfg.training.alpha = *alpha;
    if (gamma) cfg.training.gamma = *gamma;
    if (epochs) cfg.training.epochs = *epochs;
    if (minibatch) cfg.training.minibatch = *minibatch;
    if (optimizer) cfg.training.optimizer = *optimizer == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
    if (optimizer_step) cfg.training.optimizer_step = *optimizer_step;
    if (refresh_targets) cfg.training.refresh_targets = *refresh_targets;
    if (delta) cfg.temperature.delta = *delta;
    if (r_max) cfg.reflection.r_max = *r_max;
    if (eps_min) cfg.grover.eps_min = *eps_min;
    if (m_rule) {
      cfg.grover.rule = *m_rule == "uniform_integer" ? qsim::RepetitionRule::UniformInteger
                                                     : qsim::RepetitionRule::FloorUniformReal;
    }
    return cfg;
  }
};

// Expands `--config FILE` into `--key value` tokens placed before the other
// flags, so explicit flags (parsed later, last value wins) override the file.
// Lines are `key=value`; blank lines and `#` comments are skipped.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> head{argv[0]}, tail;
  std::vector<std::string> from_file;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) {
      path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      (head.size() == 1 && a.rfind("-", 0) != 0 ? head : tail).push_back(a);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string t) {
        auto b = t.find_first_not_of(" \t\r");
        auto e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
      from_file.push_back("--" + trim(line.substr(0, eq)));
      from_file.push_back(trim(line.substr(eq + 1)));
    }
  }
  head.insert(head.end(), from_file.begin(), from_file.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void print_counts(const TestCounts& c) {
  int n = c.wins + c.draws + c.losses;
  double rate = n > 0 ? 100.0 * c.wins / n : 0.0;
  std::cout << "wins " << c.wins << " draws " << c.draws << " losses " << c.losses << " win_rate " << rate << "%\n";
}

int cmd_train(const Overrides& o, std::uint64_t seed, const fs::path& out_dir) {
  auto cfg = o.build(parse_policy(o.policy));
  cfg.seeds = {seed};
  cfg.validate();
  fs::create_directories(out_dir);
  auto result = full_run(cfg, seed);
  save_checkpoint_file(result.net, (out_dir / "checkpoint.c4qn").string());
  auto metrics = open_out(out_dir / "metrics.csv");
  write_runs_csv(metrics, {result.metrics});
  auto loss = open_out(out_dir / "loss.csv");
  write_loss_csv(loss, result.metrics);
  if (uses_flags(cfg.policy)) {
    auto flags = open_out(out_dir / "flags.txt");
    result.flags.dump(flags);
  }
  write_runs_csv(std::cout, {result.metrics});
  return 0;
}

int cmd_test(const Overrides& o, std::uint64_t seed, const std::string& checkpoint) {
  auto cfg = o.build(PolicyKind::ClassicalTags);
  cfg.validate();
  auto net = load_checkpoint_file(checkpoint);
  print_counts(test_run(net, cfg, seed));
  return 0;
}

int cmd_reproduce(const Overrides& o, int seeds, unsigned jobs, const fs::path& out_dir) {
  if (seeds < 1) throw ConfigError("--seeds must be >= 1");
  const PolicyKind kinds[] = {PolicyKind::ClassicalTags, PolicyKind::QuantumTags, PolicyKind::EpsilonGreedy};
  std::vector<RunJob> list;
  for (auto p : kinds) {
    auto cfg = o.build(p);
    cfg.seeds.clear();
    for (int s = 1; s <= seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    cfg.validate();
    for (auto s : cfg.seeds) list.push_back({cfg, s});
  }
  fs::create_directories(out_dir);
  auto results = run_jobs(list, jobs, [](const RunJob&, const RunMetrics& m) {
    write_run_row(std::cerr, m);
  });
  std::vector<RunMetrics> all;
  for (const auto& r : results) all.push_back(r.metrics);
  std::vector<AggregateReport> reports;
  for (auto p : kinds) {
    std::vector<RunMetrics> group;
    for (const auto& m : all)
      if (m.agent == p) group.push_back(m);
    reports.push_back(aggregate(group));
  }
  auto runs = open_out(out_dir / "runs.csv");
  write_runs_csv(runs, all);
  auto report = open_out(out_dir / "report.csv");
  write_report_csv(report, reports);
  auto json = open_out(out_dir / "report.json");
  json << report_json(reports) << '\n';
  write_report_csv(std::cout, reports);
  return 0;
}

int cmd_play(const std::string& checkpoint, bool human_first) {
  auto net = load_checkpoint_file(checkpoint);
  const int human = human_first ? 1 : -1;
  Board board;
  int player = 1;
  while (!is_terminal(outcome(board))) {
    std::cout << to_text(board) << "0123456\n";
    Action a;
    if (player == human) {
      std::cout << "column> " << std::flush;
      int col;
      if (!(std::cin >> col)) return 1;
      a = Action{col};
      try {
        board = apply_action(board, a, player);
      } catch (const IllegalMove& e) {
        std::cout << e.what() << '\n';
        continue;
      }
    } else {
      a = argmax(q_values(net, board, player));
      std::cout << "agent plays " << a.column << '\n';
      board = apply_action(board, a, player);
    }
    player = -player;
  }
  std::cout << to_text(board) << to_string(outcome(board)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connect Four Q-learning with flagged exploration"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Each subcommand accepts --config FILE: key=value lines of long flag names (e.g. train-episodes=1800); explicit flags override the file.");

  Overrides train_o, test_o, repro_o;
  std::uint64_t train_seed = 1, test_seed = 1;
  std::string train_out = "run", repro_out = "results", test_ckpt, play_ckpt;
  int seeds = 5;
  unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
  bool human_first = true;

  auto* train = app.add_subcommand("train", "train and test one agent");
  train_o.add(train, true);
  train->add_option("--seed", train_seed, "master seed");
  train->add_option("--out", train_out, "output directory");

  auto* test = app.add_subcommand("test", "test a checkpoint against Randomized Negamax");
  test_o.add(test, false);
  test->add_option("--checkpoint", test_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  test->add_option("--seed", test_seed, "master seed");

  auto* repro = app.add_subcommand("reproduce", "multi-seed table for one role, all three agents");
  repro_o.add(repro, false);
  repro->add_option("--seeds", seeds, "number of seeds (1..N)");
  repro->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  repro->add_option("--out", repro_out, "output directory");

  auto* play = app.add_subcommand("play", "play against a checkpoint in the terminal");
  play->add_option("--checkpoint", play_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  play->add_flag("!--agent-first", human_first, "let the agent move first");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  // CLI11 takes arguments in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train) return cmd_train(train_o, train_seed, train_out);
    if (*test) return cmd_test(test_o, test_seed, test_ckpt);
    if (*repro) return cmd_reproduce(repro_o, seeds, jobs, repro_out);
    if (*play) return cmd_play(play_ckpt, human_first);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
