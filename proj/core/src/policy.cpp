#include "c4q/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "c4q/errors.hpp"

namespace c4q {

double epsilon(int episode) {
  if (episode < 1) throw ConfigError("epsilon schedule starts at episode 1");
  return std::min(1.0, 1.0 / std::log(static_cast<double>(episode) + 1.0));
}

Action argmax(const ActionValues& values) {
  if (values.empty()) throw NoLegalMoves("argmax over no actions");
  auto best = values.begin();
  for (auto it = values.begin(); it != values.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

Action epsilon_greedy_select(const ActionValues& values, double eps, Rng& rng) {
  if (values.empty()) throw NoLegalMoves("epsilon_greedy_select over no actions");
  if (uniform01(rng) < eps) {
    auto it = values.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(uniform_index(rng, values.size())));
    return it->first;
  }
  return argmax(values);
}

double temperature(int episode, const TemperatureSchedule& s) {
  if (!(s.delta > 0.0)) throw ConfigError("temperature delta must be > 0");
  return s.t_min + (s.t_max - s.t_min) / (1.0 + std::exp(s.slope * (static_cast<double>(episode) / s.delta)));
}

ActionDistribution::ActionDistribution(std::vector<std::pair<Action, double>> entries) : entries_(std::move(entries)) {
  double total = 0.0;
  for (const auto& [a, p] : entries_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("distribution probabilities must be finite and >= 0");
    total += p;
  }
  if (!(total > 0.0)) throw ConfigError("distribution has no mass");
  for (auto& e : entries_) e.second /= total;
}

double ActionDistribution::probability(Action a) const {
  for (const auto& [b, p] : entries_) {
    if (b == a) return p;
  }
  return 0.0;
}

Action ActionDistribution::sample(Rng& rng) const {
  double u = uniform01(rng);
  double acc = 0.0;
  for (const auto& [a, p] : entries_) {
    acc += p;
    if (u < acc) return a;
  }
  // Rounding left u above the final cumulative sum.
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return entries_.back().first;
}

ActionDistribution boltzmann_distribution(const ActionValues& values, double t) {
  if (!(t > 0.0)) throw ConfigError("temperature must be > 0");
  if (values.empty()) throw NoLegalMoves("boltzmann over no actions");
  double top = values.begin()->second;
  for (const auto& [a, q] : values) top = std::max(top, q);
  std::vector<std::pair<Action, double>> entries;
  entries.reserve(values.size());
  for (const auto& [a, q] : values) entries.emplace_back(a, std::exp((q - top) / t));
  return ActionDistribution(std::move(entries));
}

FlagSet FlagSet::of(const std::vector<Action>& actions) {
  FlagSet s;
  for (Action a : actions) s.insert(a);
  return s;
}

int FlagSet::count() const { return std::popcount(bits_); }

std::vector<Action> FlagSet::actions() const {
  std::vector<Action> out;
  for (int c = 0; c < kCols; ++c) {
    if ((bits_ >> c) & 1U) out.push_back(Action{c});
  }
  return out;
}

namespace {

void restore(FlagEntry& e, FlagSet legal) {
  FlagSet flags = legal;
  if (e.last_picked) flags.erase(*e.last_picked);
  e.flags = flags.empty() ? legal : flags;
}

}  // namespace

FlagEntry& FlagTable::entry_for(StateKey key, const std::vector<Action>& legal) {
  auto [it, inserted] = entries_.try_emplace(key);
  if (inserted) it->second.flags = FlagSet::of(legal);
  return it->second;
}

FlagSet FlagTable::get_flags(StateKey key, const std::vector<Action>& legal) {
  if (legal.empty()) throw NoLegalMoves("get_flags with no legal actions");
  FlagEntry& e = entry_for(key, legal);
  FlagSet legal_set = FlagSet::of(legal);
  if ((e.flags & legal_set).empty()) restore(e, legal_set);
  return e.flags & legal_set;
}

void FlagTable::update_flags(StateKey key, Action chosen, const ActionValues& values) {
  std::vector<Action> legal;
  for (const auto& [a, q] : values) legal.push_back(a);
  if (!values.contains(chosen)) throw IllegalMove("chosen action has no value");
  FlagEntry& e = entry_for(key, legal);
  double q = values.at(chosen);
  if (q < 0.0) {
    e.flags.erase(chosen);
  } else if (q > 0.0) {
    e.flags.insert(chosen);
  }
  e.last_picked = chosen;
  FlagSet legal_set = FlagSet::of(legal);
  if ((e.flags & legal_set).empty()) restore(e, legal_set);
}

const FlagEntry* FlagTable::find(StateKey key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void FlagTable::dump(std::ostream& out) const {
  std::vector<StateKey> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, e] : entries_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (StateKey k : keys) {
    const auto& e = entries_.at(k);
    out << std::hex << std::setw(16) << std::setfill('0') << k << std::dec << ' ';
    for (int c = 0; c < kCols; ++c) out << (e.flags.contains(Action{c}) ? '1' : '0');
    out << ' ';
    if (e.last_picked) {
      out << e.last_picked->column;
    } else {
      out << '-';
    }
    out << '\n';
  }
}

FlagTable FlagTable::load(std::istream& in) {
  FlagTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key_text, mask_text, last_text;
    if (!(fields >> key_text >> mask_text >> last_text) || mask_text.size() != kCols) {
      throw FormatError("bad flag table line: '" + line + "'");
    }
    FlagEntry e;
    for (int c = 0; c < kCols; ++c) {
      if (mask_text[c] == '1') {
        e.flags.insert(Action{c});
      } else if (mask_text[c] != '0') {
        throw FormatError("bad flag mask: '" + mask_text + "'");
      }
    }
    if (last_text != "-") {
      if (last_text.size() != 1 || last_text[0] < '0' || last_text[0] > '6') {
        throw FormatError("bad last_picked: '" + last_text + "'");
      }
      e.last_picked = Action{last_text[0] - '0'};
    }
    StateKey key = 0;
    try {
      key = std::stoull(key_text, nullptr, 16);
    } catch (const std::exception&) {
      throw FormatError("bad state key: '" + key_text + "'");
    }
    table.entries_[key] = e;
  }
  return table;
}

bool operator==(const FlagTable& a, const FlagTable& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (const auto& [k, e] : a.entries_) {
    auto it = b.entries_.find(k);
    if (it == b.entries_.end() || it->second.flags != e.flags || it->second.last_picked != e.last_picked) return false;
  }
  return true;
}

void ReflectionConfig::validate() const {
  if (r_max < 1) throw ConfigError("r_max must be >= 1");
}

double flagged_mass(const ActionDistribution& dist, FlagSet flags, double floor) {
  double mass = 0.0;
  for (const auto& [a, p] : dist.entries()) {
    if (flags.contains(a)) mass += p;
  }
  return std::max(mass, floor);
}

SelectionResult classical_reflect_select(const ActionDistribution& dist, FlagSet flags, const ReflectionConfig& cfg,
                                         Rng& rng) {
  SelectionResult result;
  for (int i = 1; i <= cfg.r_max; ++i) {
    result.action = dist.sample(rng);
    result.iterations_used = i;
    if (flags.contains(result.action)) {
      result.flagged_hit = true;
      return result;
    }
  }
  result.flagged_hit = false;
  return result;
}

}  // namespace c4q
