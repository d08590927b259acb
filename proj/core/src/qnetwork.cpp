#include "c4q/qnetwork.hpp"

#include <algorithm>
#include <cmath>

#include "c4q/rng.hpp"

namespace c4q {

std::size_t QNetwork::Tensor::size() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

const std::vector<QNetwork::Tensor>& QNetwork::manifest() {
  static const std::vector<Tensor> tensors = {
      {"conv.weight", {kFilters, kWindow, kWindow}, kConvW},
      {"conv.bias", {kFilters}, kConvB},
      {"dense.weight", {kHidden, kConvOut}, kDenseW},
      {"dense.bias", {kHidden}, kDenseB},
      {"head.weight", {1, kHidden}, kHeadW},
      {"head.bias", {1}, kHeadB},
  };
  return tensors;
}

QNetwork::QNetwork() : params_(kParamCount, 0.0) {}

QNetwork::QNetwork(std::uint64_t seed) : params_(kParamCount, 0.0) {
  Rng rng{seed};
  auto fill = [&](std::size_t offset, std::size_t count, double limit) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = dist(rng);
  };
  fill(kConvW, kConvB - kConvW, std::sqrt(6.0 / (kWindow * kWindow)));
  fill(kDenseW, kDenseB - kDenseW, std::sqrt(6.0 / kConvOut));
  fill(kHeadW, kHidden, 1.0 / std::sqrt(double{kHidden}));
}

void QNetwork::zero_head() {
  std::fill(params_.begin() + kHeadW, params_.end(), 0.0);
}

void QNetwork::forward(const Board& board, Activations& act) const {
  const auto& cells = board.cells();
  for (int i = 0; i < kCells; ++i) act.input[i] = cells[i];

  const double* w = params_.data();
  for (int f = 0; f < kFilters; ++f) {
    const double* kernel = w + kConvW + f * kWindow * kWindow;
    double bias = w[kConvB + f];
    for (int i = 0; i < kConvRows; ++i) {
      for (int j = 0; j < kConvCols; ++j) {
        double z = bias;
        for (int u = 0; u < kWindow; ++u) {
          const double* row = act.input.data() + (i + u) * kCols + j;
          const double* k = kernel + u * kWindow;
          z += k[0] * row[0] + k[1] * row[1] + k[2] * row[2] + k[3] * row[3];
        }
        act.conv_pre[(f * kConvRows + i) * kConvCols + j] = z;
      }
    }
  }

  std::array<double, kConvOut> conv_act;
  for (int n = 0; n < kConvOut; ++n) conv_act[n] = std::max(0.0, act.conv_pre[n]);

  double out = w[kHeadB];
  for (int k = 0; k < kHidden; ++k) {
    const double* wrow = w + kDenseW + static_cast<std::size_t>(k) * kConvOut;
    double z = w[kDenseB + k];
    for (int n = 0; n < kConvOut; ++n) z += wrow[n] * conv_act[n];
    act.hidden_pre[k] = z;
    out += w[kHeadW + k] * std::max(0.0, z);
  }
  act.output = out;
}

double QNetwork::predict(const Board& afterstate) const {
  Activations act;
  forward(afterstate, act);
  return act.output;
}

double QNetwork::accumulate_gradient(const Board& board, double target, std::span<double> grad) const {
  Activations act;
  forward(board, act);
  const double err = act.output - target;
  const double g = 2.0 * err;
  const double* w = params_.data();
  double* dw = grad.data();

  dw[kHeadB] += g;
  std::array<double, kHidden> d_hidden_pre;
  for (int k = 0; k < kHidden; ++k) {
    double h = std::max(0.0, act.hidden_pre[k]);
    dw[kHeadW + k] += g * h;
    d_hidden_pre[k] = act.hidden_pre[k] > 0.0 ? g * w[kHeadW + k] : 0.0;
  }

  std::array<double, kConvOut> conv_act;
  for (int n = 0; n < kConvOut; ++n) conv_act[n] = std::max(0.0, act.conv_pre[n]);

  std::array<double, kConvOut> d_conv{};
  for (int k = 0; k < kHidden; ++k) {
    double d = d_hidden_pre[k];
    if (d == 0.0) continue;
    dw[kDenseB + k] += d;
    const double* wrow = w + kDenseW + static_cast<std::size_t>(k) * kConvOut;
    double* drow = dw + kDenseW + static_cast<std::size_t>(k) * kConvOut;
    for (int n = 0; n < kConvOut; ++n) {
      drow[n] += d * conv_act[n];
      d_conv[n] += d * wrow[n];
    }
  }

  for (int f = 0; f < kFilters; ++f) {
    double* dkernel = dw + kConvW + f * kWindow * kWindow;
    for (int i = 0; i < kConvRows; ++i) {
      for (int j = 0; j < kConvCols; ++j) {
        int n = (f * kConvRows + i) * kConvCols + j;
        if (act.conv_pre[n] <= 0.0) continue;
        double d = d_conv[n];
        dw[kConvB + f] += d;
        for (int u = 0; u < kWindow; ++u) {
          for (int v = 0; v < kWindow; ++v) dkernel[u * kWindow + v] += d * act.input[(i + u) * kCols + j + v];
        }
      }
    }
  }
  return err * err;
}

}  // namespace c4q
