#include "c4q/qsim.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "test_util.hpp"

namespace c4q::qsim {
namespace {

using Amp = StateVector::Amplitude;
using Matrix = std::array<std::array<Amp, kDim>, kDim>;

ActionDistribution uniform8() {
  std::vector<std::pair<Action, double>> e;
  for (int i = 0; i < kDim; ++i) e.emplace_back(Action{i}, 1.0 / kDim);
  return ActionDistribution(e);
}

ActionDistribution random_distribution(Rng& rng, int support) {
  std::vector<std::pair<Action, double>> e;
  for (int i = 0; i < support; ++i) e.emplace_back(Action{i}, uniform01(rng) < 0.15 ? 0.0 : uniform01(rng));
  if (e.front().second == 0.0 && e.back().second == 0.0) e.front().second = 0.5;
  return ActionDistribution(e);
}

StateVector random_state(Rng& rng) {
  std::array<Amp, kDim> a;
  double n = 0.0;
  for (auto& x : a) {
    x = Amp(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    n += std::norm(x);
  }
  for (auto& x : a) x /= std::sqrt(n);
  return StateVector(a);
}

// 2|pi><pi| - I built directly from sqrt(p).
Matrix dense_reflection(const std::array<double, kDim>& p) {
  Matrix m{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m[i][j] = 2.0 * std::sqrt(p[i]) * std::sqrt(p[j]) - (i == j ? 1.0 : 0.0);
  return m;
}

Matrix dense_oracle(std::uint8_t marked) {
  Matrix m{};
  for (int i = 0; i < kDim; ++i) m[i][i] = ((marked >> i) & 1U) ? -1.0 : 1.0;
  return m;
}

StateVector mat_apply(const Matrix& m, const StateVector& v) {
  std::array<Amp, kDim> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out[i] += m[i][j] * v[j];
  return StateVector(out);
}

double max_diff(const StateVector& a, const StateVector& b) {
  double d = 0.0;
  for (int i = 0; i < kDim; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TEST(Angles, UniformIsHalfPiEverywhere) {
  auto tree = angles_from_distribution(uniform8());
  for (double t : tree.theta) EXPECT_NEAR(t, std::numbers::pi / 2, 1e-12);
}

TEST(Angles, PointMassOnZero) {
  ActionDistribution d({{Action{0}, 1.0}, {Action{3}, 0.0}, {Action{6}, 0.0}});
  auto tree = angles_from_distribution(d);
  for (double t : tree.theta) EXPECT_EQ(t, 0.0);
  StateVector sv = encode(tree);
  EXPECT_NEAR(std::abs(sv[0] - Amp(1.0)), 0.0, 1e-15);
  for (int i = 1; i < kDim; ++i) EXPECT_EQ(std::abs(sv[i]), 0.0);
}

TEST(Encode, UniformAmplitudes) {
  StateVector sv = encode(angles_from_distribution(uniform8()));
  for (int i = 0; i < kDim; ++i) EXPECT_NEAR(std::abs(sv[i] - Amp(1.0 / std::sqrt(8.0))), 0.0, 1e-12);
}

TEST(Encode, SevenActionsLeavePaddingEmpty) {
  Rng rng(1);
  auto d = random_distribution(rng, 7);
  StateVector sv = encode(angles_from_distribution(d));
  EXPECT_LT(sv.probability(7), 1e-24);
}

TEST(Encode, ReproducesDistributionWithNonnegativeRealAmplitudes) {
  Rng rng(2);
  for (int trial = 0; trial < 5000; ++trial) {
    int support = 1 + static_cast<int>(uniform_index(rng, 8));
    auto d = random_distribution(rng, support);
    StateVector sv = encode(angles_from_distribution(d));
    auto p = basis_probabilities(d);
    for (int i = 0; i < kDim; ++i) {
      ASSERT_NEAR(sv.probability(i), p[i], 1e-12);
      ASSERT_GE(sv[i].real(), -1e-15);
      ASSERT_NEAR(sv[i].imag(), 0.0, 1e-15);
    }
    ASSERT_NEAR(sv.norm_squared(), 1.0, 1e-9);
  }
}

TEST(Encode, InverseUndoesEncoding) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto tree = angles_from_distribution(random_distribution(rng, 8));
    StateVector v = random_state(rng);
    StateVector w = v;
    apply_encoding(w, tree);
    apply_encoding_inverse(w, tree);
    ASSERT_LT(max_diff(v, w), 1e-12);
  }
}

TEST(ReflectFlags, Cases) {
  Rng rng(4);
  StateVector v = random_state(rng);
  EXPECT_EQ(max_diff(reflect_flags(v, FlagOracle{0}), v), 0.0);
  StateVector all = reflect_flags(v, FlagOracle{0xFF});
  for (int i = 0; i < kDim; ++i) {
    EXPECT_EQ(all[i], -v[i]);
    EXPECT_DOUBLE_EQ(all.probability(i), v.probability(i));
  }
  StateVector one = reflect_flags(v, FlagOracle{0x01});
  EXPECT_EQ(one[0], -v[0]);
  for (int i = 1; i < kDim; ++i) EXPECT_EQ(one[i], v[i]);
}

TEST(ReflectPi, FixedPointAndOrthogonalNegation) {
  Rng rng(5);
  auto d = random_distribution(rng, 7);
  auto tree = angles_from_distribution(d);
  StateVector pi = encode(tree);
  EXPECT_LT(max_diff(reflect_pi(pi, tree), pi), 1e-12);

  // Gram-Schmidt a random vector against |pi>.
  StateVector v = random_state(rng);
  Amp overlap = 0.0;
  for (int i = 0; i < kDim; ++i) overlap += std::conj(pi[i]) * v[i];
  std::array<Amp, kDim> w;
  double n = 0.0;
  for (int i = 0; i < kDim; ++i) {
    w[i] = v[i] - overlap * pi[i];
    n += std::norm(w[i]);
  }
  for (auto& x : w) x /= std::sqrt(n);
  StateVector orth(w);
  StateVector r = reflect_pi(orth, tree);
  for (int i = 0; i < kDim; ++i) EXPECT_NEAR(std::abs(r[i] + orth[i]), 0.0, 1e-12);
  EXPECT_LT(max_diff(r, mat_apply(dense_reflection(basis_probabilities(d)), orth)), 1e-12);
}

TEST(ReflectPi, InvolutionAndDenseEquivalence) {
  Rng rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    auto d = random_distribution(rng, 1 + static_cast<int>(uniform_index(rng, 8)));
    auto tree = angles_from_distribution(d);
    StateVector v = random_state(rng);
    StateVector r = reflect_pi(v, tree);
    ASSERT_LT(max_diff(reflect_pi(r, tree), v), 1e-9);
    ASSERT_LT(max_diff(r, mat_apply(dense_reflection(basis_probabilities(d)), v)), 1e-9);
    auto marked = static_cast<std::uint8_t>(uniform_index(rng, 256));
    StateVector f = reflect_flags(v, FlagOracle{marked});
    ASSERT_LT(max_diff(f, mat_apply(dense_oracle(marked), v)), 1e-15);
    ASSERT_NEAR(r.norm_squared(), 1.0, 1e-9);
    ASSERT_NEAR(f.norm_squared(), 1.0, 1e-9);
  }
}

TEST(Grover, FlaggedAmplitudesStayProportionalToPi) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    auto d = random_distribution(rng, 7);
    auto p = basis_probabilities(d);
    FlagSet flags;
    for (int c = 0; c < kCols; ++c) {
      if (p[c] > 0.0 && uniform01(rng) < 0.5) flags.insert(Action{c});
    }
    if (flags.empty()) flags.insert(d.entries().front().second > 0 ? Action{0} : Action{6});
    int m = static_cast<int>(uniform_index(rng, 6));
    StateVector sv = grover_state(d, flags, m);
    ASSERT_NEAR(sv.norm_squared(), 1.0, 1e-9);
    // amp_a / sqrt(p_a) must be one common value on flagged and one on unflagged.
    std::optional<Amp> flagged_ratio, other_ratio;
    for (int c = 0; c < kCols; ++c) {
      if (p[c] <= 1e-6) continue;
      Amp ratio = sv[c] / std::sqrt(p[c]);
      auto& ref = flags.contains(Action{c}) ? flagged_ratio : other_ratio;
      if (!ref) {
        ref = ratio;
      } else {
        ASSERT_LT(std::abs(ratio - *ref), 1e-9);
      }
    }
  }
}

TEST(Grover, RepetitionRange) {
  GroverConfig cfg;
  EXPECT_EQ(max_repetitions(1.0, cfg), 1);
  EXPECT_EQ(max_repetitions(0.1, cfg), 3);
  EXPECT_EQ(max_repetitions(0.04, cfg), 5);
  EXPECT_EQ(max_repetitions(0.001, cfg), 5);  // floored at eps_min
  Rng rng(8);
  for (auto rule : {RepetitionRule::UniformInteger, RepetitionRule::FloorUniformReal}) {
    cfg.rule = rule;
    std::array<int, 6> hist{};
    for (int i = 0; i < 20000; ++i) {
      int m = draw_repetitions(0.1, cfg, rng);
      ASSERT_GE(m, 0);
      ASSERT_LE(m, 3);
      hist[m]++;
    }
    if (rule == RepetitionRule::UniformInteger) {
      for (int k = 0; k <= 3; ++k) EXPECT_NEAR(hist[k] / 20000.0, 0.25, 0.02);
    } else {
      double span = 1.0 / std::sqrt(0.1);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(hist[k] / 20000.0, 1.0 / span, 0.02);
      EXPECT_NEAR(hist[3] / 20000.0, (span - 3.0) / span, 0.02);
    }
  }
}

TEST(Grover, SingleMarkedOfEightAtTwoIterations) {
  Rng rng(9);
  auto d = uniform8();
  FlagSet flags;
  flags.insert(Action{0});
  double closed = std::pow(std::sin(5.0 * std::asin(std::sqrt(1.0 / 8.0))), 2);
  EXPECT_NEAR(closed, 0.945, 1e-3);
  EXPECT_NEAR(grover_state(d, flags, 2).probability(0), closed, 1e-12);
  constexpr int kTrials = 100000;
  int hits = 0;
  for (int i = 0; i < kTrials; ++i) hits += grover_sample_fixed(d, flags, 2, rng).action.column == 0;
  EXPECT_NEAR(hits / double(kTrials), closed, 0.02);
}

TEST(Grover, NoIterationsOrAllFlaggedSamplesPi) {
  Rng rng(10);
  ActionDistribution d({{Action{0}, 0.1}, {Action{2}, 0.5}, {Action{3}, 0.15}, {Action{6}, 0.25}});
  FlagSet some;
  some.insert(Action{2});
  FlagSet all = FlagSet::of({Action{0}, Action{2}, Action{3}, Action{6}});
  for (auto [flags, m] : {std::pair{some, 0}, std::pair{all, 1}, std::pair{all, 3}}) {
    std::vector<double> observed(kCols, 0.0), expected(kCols, 0.0);
    constexpr int kTrials = 20000;
    for (int i = 0; i < kTrials; ++i) observed[grover_sample_fixed(d, flags, m, rng).action.column] += 1;
    for (const auto& [a, p] : d.entries()) expected[a.column] = p * kTrials;
    EXPECT_GT(testing::chi_square_p_value(testing::chi_square_statistic(observed, expected), 3), 0.001);
  }
}

TEST(Measure, NeverReturnsZeroProbabilityStates) {
  Rng rng(11);
  ActionDistribution d({{Action{1}, 0.5}, {Action{4}, 0.5}});
  // Dust on padding and illegal states.
  std::array<Amp, kDim> a{};
  a[1] = std::sqrt(0.5 - 1e-9);
  a[4] = std::sqrt(0.5 - 1e-9);
  a[7] = std::sqrt(1e-9);
  a[0] = std::sqrt(1e-9);
  StateVector sv(a);
  for (int i = 0; i < 20000; ++i) {
    int c = measure(sv, d, rng).column;
    ASSERT_TRUE(c == 1 || c == 4);
  }
}

TEST(QuantumReflect, AllFlaggedAcceptsFirstRound) {
  Rng rng(12);
  ActionDistribution d({{Action{0}, 0.2}, {Action{1}, 0.3}, {Action{5}, 0.5}});
  FlagSet all = FlagSet::of({Action{0}, Action{1}, Action{5}});
  std::vector<double> observed(kCols, 0.0), expected(kCols, 0.0);
  constexpr int kTrials = 10000;
  for (int i = 0; i < kTrials; ++i) {
    auto r = quantum_reflect_select(d, all, ReflectionConfig{}, GroverConfig{}, rng);
    ASSERT_EQ(r.iterations_used, 1);
    ASSERT_TRUE(r.flagged_hit);
    observed[r.action.column] += 1;
  }
  for (const auto& [a, p] : d.entries()) expected[a.column] = p * kTrials;
  EXPECT_GT(testing::chi_square_p_value(testing::chi_square_statistic(observed, expected), 2), 0.001);
}

TEST(QuantumReflect, FewerIterationsThanClassicalAtLowFlaggedMass) {
  // Flagged mass 0.1 over seven actions.
  ActionDistribution d({{Action{0}, 0.1},
                        {Action{1}, 0.15},
                        {Action{2}, 0.15},
                        {Action{3}, 0.15},
                        {Action{4}, 0.15},
                        {Action{5}, 0.15},
                        {Action{6}, 0.15}});
  FlagSet flags;
  flags.insert(Action{0});
  for (auto rule : {RepetitionRule::UniformInteger, RepetitionRule::FloorUniformReal}) {
    GroverConfig g;
    g.rule = rule;
    Rng rq(13), rc(14);
    long long q_iters = 0;
    long long c_iters = 0;
    constexpr int kTrials = 10000;
    for (int i = 0; i < kTrials; ++i) {
      auto q = quantum_reflect_select(d, flags, ReflectionConfig{}, g, rq);
      auto c = classical_reflect_select(d, flags, ReflectionConfig{}, rc);
      ASSERT_LE(q.iterations_used, 5);
      ASSERT_TRUE(q.flagged_hit || q.iterations_used == 5);
      q_iters += q.iterations_used;
      c_iters += c.iterations_used;
    }
    EXPECT_LT(q_iters, c_iters);
  }
}

}  // namespace
}  // namespace c4q::qsim
