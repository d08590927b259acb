#pragma once

#include <array>
#include <complex>
#include <cstdint>

#include "c4q/policy.hpp"
#include "c4q/rng.hpp"

namespace c4q::qsim {

inline constexpr int kQubits = 3;
inline constexpr int kDim = 1 << kQubits;

// Basis state |b1 b2 b3> has index 4*b1 + 2*b2 + b3 and encodes column
// `index`; index 7 is padding. Qubit 1 is the most significant bit.
class StateVector {
 public:
  using Amplitude = std::complex<double>;

  // |000>
  StateVector();
  explicit StateVector(const std::array<Amplitude, kDim>& amps) : amps_(amps) {}

  const Amplitude& operator[](int i) const { return amps_[i]; }
  Amplitude& operator[](int i) { return amps_[i]; }
  const std::array<Amplitude, kDim>& amplitudes() const { return amps_; }

  double norm_squared() const;
  double probability(int i) const { return std::norm(amps_[i]); }

  // Y rotation on `qubit` (1..3) applied where the other qubits selected by
  // `control_mask` (index bits) equal `control_value`.
  void apply_ry(int qubit, double theta, unsigned control_mask = 0, unsigned control_value = 0);

 private:
  std::array<Amplitude, kDim> amps_;
};

// theta[0] root rotation; theta[1..2] second level (qubit 1 = 0, 1);
// theta[3..6] third level (qubits 1,2 = 00, 01, 10, 11).
struct AngleTree {
  std::array<double, 7> theta{};
};

// Probabilities over the 8 basis states, legal columns from `dist`.
std::array<double, kDim> basis_probabilities(const ActionDistribution& dist);

AngleTree angles_from_distribution(const ActionDistribution& dist);
AngleTree angles_from_probabilities(const std::array<double, kDim>& probs);

// U|000> via nested controlled Y rotations.
StateVector encode(const AngleTree& tree);
void apply_encoding(StateVector& sv, const AngleTree& tree);
void apply_encoding_inverse(StateVector& sv, const AngleTree& tree);

struct FlagOracle {
  std::uint8_t marked = 0;  // bit i marks basis state i
  static FlagOracle from_flags(FlagSet flags) { return FlagOracle{flags.bits()}; }
  bool contains(int i) const { return (marked >> i) & 1U; }
};

// |a> -> -|a> for marked a.
StateVector reflect_flags(StateVector sv, const FlagOracle& oracle);

// U D0 U^dagger with D0 = 2|000><000| - I, i.e. 2|pi><pi| - I.
StateVector reflect_pi(StateVector sv, const AngleTree& tree);

// The reflection limit is shared with the classical selector through
// ReflectionConfig.
enum class RepetitionRule {
  UniformInteger,     // m uniform over {0, ..., floor(1/sqrt(eps))}
  FloorUniformReal,   // m = floor(u / sqrt(eps)), u uniform in [0, 1)
};

struct GroverConfig {
  double eps_min = 0.04;
  RepetitionRule rule = RepetitionRule::FloorUniformReal;
  void validate() const;
};

// Largest repetition count for flagged mass `eps` (floored at eps_min).
int max_repetitions(double eps, const GroverConfig& cfg);

// |pi> followed by m rounds of reflect_flags then reflect_pi.
StateVector grover_state(const ActionDistribution& dist, FlagSet flags, int m);

// Measures `sv`; outcomes with zero probability under `dist` (padding,
// illegal columns) are resampled.
Action measure(const StateVector& sv, const ActionDistribution& dist, Rng& rng);

struct GroverSample {
  Action action;
  int m_used = 0;
};

// m drawn per cfg.rule from the flagged mass floored at eps_min.
int draw_repetitions(double eps, const GroverConfig& cfg, Rng& rng);

// m drawn by draw_repetitions from the flagged mass of `flags`.
GroverSample grover_sample(const ActionDistribution& dist, FlagSet flags, const GroverConfig& cfg, Rng& rng);

// Fixed repetition count.
GroverSample grover_sample_fixed(const ActionDistribution& dist, FlagSet flags, int m, Rng& rng);

// Up to r_max rounds of grover_sample; first flagged measurement wins,
// otherwise the last measurement is returned unflagged.
SelectionResult quantum_reflect_select(const ActionDistribution& dist, FlagSet flags, const ReflectionConfig& r_cfg,
                                       const GroverConfig& g_cfg, Rng& rng);

}  // namespace c4q::qsim
