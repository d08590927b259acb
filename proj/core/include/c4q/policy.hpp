#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "c4q/board.hpp"
#include "c4q/rng.hpp"

namespace c4q {

// ---- epsilon-greedy ------------------------------------------------------

// min(1, 1 / ln(episode + 1)) for episode >= 1.
double epsilon(int episode);

// Highest value, lowest column on ties.
Action argmax(const ActionValues& values);

Action epsilon_greedy_select(const ActionValues& values, double eps, Rng& rng);

// ---- Boltzmann -----------------------------------------------------------

struct TemperatureSchedule {
  double t_min = 0.2;
  double t_max = 20.0;
  double slope = 0.35;
  double delta = 150.0;
};

// T = t_min + (t_max - t_min) / (1 + exp(slope * episode / delta))
double temperature(int episode, const TemperatureSchedule& schedule);

class ActionDistribution {
 public:
  ActionDistribution() = default;
  explicit ActionDistribution(std::vector<std::pair<Action, double>> entries);

  const std::vector<std::pair<Action, double>>& entries() const { return entries_; }
  double probability(Action a) const;
  std::size_t size() const { return entries_.size(); }

  Action sample(Rng& rng) const;

 private:
  std::vector<std::pair<Action, double>> entries_;
};

// Softmax of values / T with max subtraction.
ActionDistribution boltzmann_distribution(const ActionValues& values, double temperature);

// ---- flags ---------------------------------------------------------------

class FlagSet {
 public:
  constexpr FlagSet() = default;
  constexpr explicit FlagSet(std::uint8_t bits) : bits_(bits & 0x7F) {}
  static FlagSet of(const std::vector<Action>& actions);

  bool contains(Action a) const { return (bits_ >> a.column) & 1U; }
  void insert(Action a) { bits_ |= static_cast<std::uint8_t>(1U << a.column); }
  void erase(Action a) { bits_ &= static_cast<std::uint8_t>(~(1U << a.column)); }
  bool empty() const { return bits_ == 0; }
  int count() const;
  std::uint8_t bits() const { return bits_; }
  std::vector<Action> actions() const;

  friend FlagSet operator&(FlagSet a, FlagSet b) { return FlagSet(a.bits_ & b.bits_); }
  friend bool operator==(FlagSet, FlagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct FlagEntry {
  FlagSet flags;
  std::optional<Action> last_picked;
};

// Per-state action flags, kept for the whole run.
class FlagTable {
 public:
  // Flags of `key` restricted to `legal`; creates an all-flagged entry on
  // first visit. If no legal action is flagged (e.g. the only flagged column
  // filled up), re-flags every legal action except the last one picked.
  FlagSet get_flags(StateKey key, const std::vector<Action>& legal);

  // Applied to the chosen action after selection: Q < 0 unflags, Q > 0
  // flags, Q == 0 leaves it. If every legal action (keys of `values`) ends up
  // unflagged, all but `chosen` are flagged again.
  void update_flags(StateKey key, Action chosen, const ActionValues& values);

  const FlagEntry* find(StateKey key) const;
  std::size_t size() const { return entries_.size(); }

  // One line per state, sorted by key: "<key hex16> <flags c0..c6> <last|->".
  void dump(std::ostream& out) const;
  static FlagTable load(std::istream& in);

  friend bool operator==(const FlagTable&, const FlagTable&);

 private:
  FlagEntry& entry_for(StateKey key, const std::vector<Action>& legal);
  std::unordered_map<StateKey, FlagEntry> entries_;
};

// ---- reflection ----------------------------------------------------------

struct ReflectionConfig {
  int r_max = 5;
  void validate() const;
};

struct SelectionResult {
  Action action;
  int iterations_used = 1;
  bool flagged_hit = true;
};

// Probability mass of the flagged actions, floored at `floor`.
double flagged_mass(const ActionDistribution& dist, FlagSet flags, double floor = 0.0);

// Up to r_max independent draws; the first flagged draw wins, otherwise the
// last draw is returned unflagged.
SelectionResult classical_reflect_select(const ActionDistribution& dist, FlagSet flags, const ReflectionConfig& cfg,
                                         Rng& rng);

}  // namespace c4q
