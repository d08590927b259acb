#include "c4q/qsim.hpp"

#include <algorithm>
#include <cmath>

#include "c4q/errors.hpp"

namespace c4q::qsim {

StateVector::StateVector() { amps_[0] = 1.0; }

double StateVector::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

void StateVector::apply_ry(int qubit, double theta, unsigned control_mask, unsigned control_value) {
  const unsigned target = 1U << (kQubits - qubit);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  for (unsigned i = 0; i < kDim; ++i) {
    if ((i & target) || (i & control_mask) != control_value) continue;
    Amplitude zero = amps_[i];
    Amplitude one = amps_[i | target];
    amps_[i] = c * zero - s * one;
    amps_[i | target] = s * zero + c * one;
  }
}

std::array<double, kDim> basis_probabilities(const ActionDistribution& dist) {
  std::array<double, kDim> p{};
  for (const auto& [a, prob] : dist.entries()) p[a.column] = prob;
  return p;
}

namespace {

// 2 acos(sqrt(part / whole)); zero-mass subtrees get 0.
double split_angle(double part, double whole) {
  if (!(whole > 0.0)) return 0.0;
  double ratio = std::clamp(part / whole, 0.0, 1.0);
  return 2.0 * std::acos(std::sqrt(ratio));
}

constexpr unsigned kQ1 = 4;
constexpr unsigned kQ2 = 2;

}  // namespace

AngleTree angles_from_probabilities(const std::array<double, kDim>& p) {
  double left = p[0] + p[1] + p[2] + p[3];
  double right = p[4] + p[5] + p[6] + p[7];
  AngleTree t;
  t.theta[0] = split_angle(left, left + right);
  t.theta[1] = split_angle(p[0] + p[1], left);
  t.theta[2] = split_angle(p[4] + p[5], right);
  t.theta[3] = split_angle(p[0], p[0] + p[1]);
  t.theta[4] = split_angle(p[2], p[2] + p[3]);
  t.theta[5] = split_angle(p[4], p[4] + p[5]);
  t.theta[6] = split_angle(p[6], p[6] + p[7]);
  return t;
}

AngleTree angles_from_distribution(const ActionDistribution& dist) {
  return angles_from_probabilities(basis_probabilities(dist));
}

void apply_encoding(StateVector& sv, const AngleTree& t) {
  sv.apply_ry(1, t.theta[0]);
  sv.apply_ry(2, t.theta[1], kQ1, 0);
  sv.apply_ry(2, t.theta[2], kQ1, kQ1);
  sv.apply_ry(3, t.theta[3], kQ1 | kQ2, 0);
  sv.apply_ry(3, t.theta[4], kQ1 | kQ2, kQ2);
  sv.apply_ry(3, t.theta[5], kQ1 | kQ2, kQ1);
  sv.apply_ry(3, t.theta[6], kQ1 | kQ2, kQ1 | kQ2);
}

void apply_encoding_inverse(StateVector& sv, const AngleTree& t) {
  sv.apply_ry(3, -t.theta[6], kQ1 | kQ2, kQ1 | kQ2);
  sv.apply_ry(3, -t.theta[5], kQ1 | kQ2, kQ1);
  sv.apply_ry(3, -t.theta[4], kQ1 | kQ2, kQ2);
  sv.apply_ry(3, -t.theta[3], kQ1 | kQ2, 0);
  sv.apply_ry(2, -t.theta[2], kQ1, kQ1);
  sv.apply_ry(2, -t.theta[1], kQ1, 0);
  sv.apply_ry(1, -t.theta[0]);
}

StateVector encode(const AngleTree& tree) {
  StateVector sv;
  apply_encoding(sv, tree);
  return sv;
}

StateVector reflect_flags(StateVector sv, const FlagOracle& oracle) {
  for (int i = 0; i < kDim; ++i) {
    if (oracle.contains(i)) sv[i] = -sv[i];
  }
  return sv;
}

StateVector reflect_pi(StateVector sv, const AngleTree& tree) {
  apply_encoding_inverse(sv, tree);
  for (int i = 1; i < kDim; ++i) sv[i] = -sv[i];
  apply_encoding(sv, tree);
  return sv;
}

void GroverConfig::validate() const {
  if (!(eps_min > 0.0 && eps_min <= 1.0)) throw ConfigError("eps_min must lie in (0, 1]");
}

int max_repetitions(double eps, const GroverConfig& cfg) {
  eps = std::clamp(eps, cfg.eps_min, 1.0);
  // The tolerance keeps exact squares such as 0.04 from rounding down.
  return static_cast<int>(std::floor(1.0 / std::sqrt(eps) + 1e-9));
}

StateVector grover_state(const ActionDistribution& dist, FlagSet flags, int m) {
  AngleTree tree = angles_from_distribution(dist);
  FlagOracle oracle = FlagOracle::from_flags(flags);
  StateVector sv = encode(tree);
  for (int i = 0; i < m; ++i) sv = reflect_pi(reflect_flags(sv, oracle), tree);
  return sv;
}

Action measure(const StateVector& sv, const ActionDistribution& dist, Rng& rng) {
  auto allowed = basis_probabilities(dist);
  std::array<double, kDim> weights{};
  double total = 0.0;
  for (int i = 0; i < kDim; ++i) {
    weights[i] = sv.probability(i);
    total += weights[i];
  }
  for (;;) {
    double u = uniform01(rng) * total;
    int pick = kDim - 1;
    double acc = 0.0;
    for (int i = 0; i < kDim; ++i) {
      acc += weights[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    if (allowed[pick] > 0.0) return Action{pick};
  }
}

GroverSample grover_sample_fixed(const ActionDistribution& dist, FlagSet flags, int m, Rng& rng) {
  return GroverSample{measure(grover_state(dist, flags, m), dist, rng), m};
}

int draw_repetitions(double eps, const GroverConfig& cfg, Rng& rng) {
  if (cfg.rule == RepetitionRule::UniformInteger) {
    int upper = max_repetitions(eps, cfg);
    return static_cast<int>(uniform_index(rng, static_cast<std::size_t>(upper) + 1));
  }
  double span = 1.0 / std::sqrt(std::clamp(eps, cfg.eps_min, 1.0));
  return std::min(static_cast<int>(uniform01(rng) * span), max_repetitions(eps, cfg));
}

GroverSample grover_sample(const ActionDistribution& dist, FlagSet flags, const GroverConfig& cfg, Rng& rng) {
  int m = draw_repetitions(flagged_mass(dist, flags), cfg, rng);
  return grover_sample_fixed(dist, flags, m, rng);
}

SelectionResult quantum_reflect_select(const ActionDistribution& dist, FlagSet flags, const ReflectionConfig& r_cfg,
                                       const GroverConfig& g_cfg, Rng& rng) {
  SelectionResult result;
  for (int i = 1; i <= r_cfg.r_max; ++i) {
    result.action = grover_sample(dist, flags, g_cfg, rng).action;
    result.iterations_used = i;
    if (flags.contains(result.action)) {
      result.flagged_hit = true;
      return result;
    }
  }
  result.flagged_hit = false;
  return result;
}

}  // namespace c4q::qsim
