#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "c4q/board.hpp"

namespace c4q {

// Afterstate value network:
//   6x7 signed board -> conv 32 x (4x4), stride 1, valid -> ReLU (3x4x32)
//   -> dense 64 -> ReLU -> dense 1 (linear).
// Parameters live in one flat vector so optimizers, gradient checks and
// checkpoints can treat them uniformly.
class QNetwork {
 public:
  static constexpr int kFilters = 32;
  static constexpr int kWindow = 4;
  static constexpr int kConvRows = kRows - kWindow + 1;  // 3
  static constexpr int kConvCols = kCols - kWindow + 1;  // 4
  static constexpr int kConvOut = kFilters * kConvRows * kConvCols;  // 384
  static constexpr int kHidden = 64;

  static constexpr std::size_t kConvW = 0;
  static constexpr std::size_t kConvB = kConvW + kFilters * kWindow * kWindow;
  static constexpr std::size_t kDenseW = kConvB + kFilters;
  static constexpr std::size_t kDenseB = kDenseW + static_cast<std::size_t>(kHidden) * kConvOut;
  static constexpr std::size_t kHeadW = kDenseB + kHidden;
  static constexpr std::size_t kHeadB = kHeadW + kHidden;
  static constexpr std::size_t kParamCount = kHeadB + 1;

  struct Tensor {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::size_t offset;
    std::size_t size() const;
  };
  static const std::vector<Tensor>& manifest();

  // All parameters zero.
  QNetwork();
  // Uniform fan-in initialization (He-uniform for ReLU layers, 1/sqrt(fan_in)
  // for the head); biases start at zero.
  explicit QNetwork(std::uint64_t seed);

  double predict(const Board& afterstate) const;

  // Adds the gradient of (predict(board) - target)^2 into `grad` and returns
  // the squared error. `grad` must have kParamCount entries.
  double accumulate_gradient(const Board& board, double target, std::span<double> grad) const;

  void zero_head();

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  struct Activations {
    std::array<double, kCells> input;
    std::array<double, kConvOut> conv_pre;
    std::array<double, kHidden> hidden_pre;
    double output;
  };
  void forward(const Board& board, Activations& act) const;

  std::vector<double> params_;
};

}  // namespace c4q
