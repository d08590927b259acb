#include "c4q/negamax.hpp"

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "c4q/errors.hpp"

namespace c4q {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 2;

// Value of a child reached by `player` at distance `ply` from the root, or
// nothing if the child is not terminal.
bool terminal_child_score(const Board& child, int player, int ply, int win_score, int& score) {
  Outcome o = outcome(child);
  if (o == Outcome::Ongoing) return false;
  if (o == Outcome::Draw) {
    score = 0;
  } else {
    bool mover_won = (o == Outcome::Win1) == (player == 1);
    score = mover_won ? win_score - ply : -(win_score - ply);
  }
  return true;
}

int search(const Board& board, int depth, int alpha, int beta, int player, int ply, int win_score, bool prune) {
  int best = -kInf;
  for (int c = 0; c < kCols; ++c) {
    if (board.column_full(c)) continue;
    Board child = apply_action(board, Action{c}, player);
    int value;
    if (!terminal_child_score(child, player, ply, win_score, value)) {
      value = depth <= 1 ? heuristic_eval(child, player)
                         : -search(child, depth - 1, -beta, -alpha, -player, ply + 1, win_score, prune);
    }
    best = std::max(best, value);
    if (prune) {
      alpha = std::max(alpha, value);
      if (alpha >= beta) break;
    }
  }
  return best;
}

ScoredMoves score_root(const Board& board, int depth, int player, int win_score, bool prune) {
  if (depth < 1) throw ConfigError("negamax depth must be >= 1");
  if (is_terminal(outcome(board))) throw NoLegalMoves("position is terminal");
  ScoredMoves out;
  for (int c = 0; c < kCols; ++c) {
    if (board.column_full(c)) continue;
    Board child = apply_action(board, Action{c}, player);
    int value;
    if (!terminal_child_score(child, player, 1, win_score, value)) {
      value = depth <= 1 ? heuristic_eval(child, player)
                         : -search(child, depth - 1, -kInf, kInf, -player, 2, win_score, prune);
    }
    out.scores.emplace(Action{c}, value);
    out.best_score = std::max(out.best_score, value);
  }
  return out;
}

}  // namespace

void NegamaxConfig::validate() const {
  if (depth < 1) throw ConfigError("negamax depth must be >= 1");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in [0, 1]");
  // 12 windows, each contributing at most 2 * 4 in magnitude per sign.
  if (win_score <= 12 * 16 + depth) throw ConfigError("win_score must exceed every heuristic value");
}

Action ScoredMoves::best_action() const {
  if (scores.empty()) throw NoLegalMoves("no scored moves");
  Action best = scores.begin()->first;
  int value = scores.begin()->second;
  for (const auto& [a, s] : scores) {
    if (s > value) {
      best = a;
      value = s;
    }
  }
  return best;
}

int heuristic_eval(const Board& board, int player) {
  int max_heuristic = 0;
  int min_heuristic = 0;
  for (int r0 = 0; r0 + 4 <= kRows; ++r0) {
    for (int c0 = 0; c0 + 4 <= kCols; ++c0) {
      int hi = std::numeric_limits<int>::min();
      int lo = std::numeric_limits<int>::max();
      auto take = [&](int s) {
        hi = std::max(hi, s);
        lo = std::min(lo, s);
      };
      int diag = 0;
      int anti = 0;
      for (int k = 0; k < 4; ++k) {
        int row = 0;
        int col = 0;
        for (int j = 0; j < 4; ++j) {
          row += board.cell(r0 + k, c0 + j);
          col += board.cell(r0 + j, c0 + k);
        }
        take(row);
        take(col);
        diag += board.cell(r0 + k, c0 + k);
        anti += board.cell(r0 + k, c0 + 3 - k);
      }
      take(diag);
      take(anti);
      if (hi > 1) max_heuristic += 2 * hi;
      if (lo < -1) min_heuristic += 2 * lo;
    }
  }
  int value = max_heuristic + min_heuristic;
  return player == 1 ? value : -value;
}

ScoredMoves negamax(const Board& board, int depth, int player, int win_score) {
  return score_root(board, depth, player, win_score, true);
}

ScoredMoves minimax_reference(const Board& board, int depth, int player, int win_score) {
  return score_root(board, depth, player, win_score, false);
}

bool is_critical(const ScoredMoves& moves, const NegamaxConfig& config) {
  return std::abs(moves.best_score) >= config.win_score - config.depth;
}

Action select_from_scores(const ScoredMoves& moves, const NegamaxConfig& config, Rng& rng) {
  if (moves.scores.empty()) throw NoLegalMoves("no legal moves");
  Action best = moves.best_action();
  if (is_critical(moves, config)) return best;
  // Draw unconditionally so the stream advances identically for every omega.
  if (uniform01(rng) >= config.omega) return best;
  std::vector<Action> positive;
  std::vector<Action> all;
  for (const auto& [a, s] : moves.scores) {
    all.push_back(a);
    if (s > 0) positive.push_back(a);
  }
  const auto& pool = positive.empty() ? all : positive;
  return pool[uniform_index(rng, pool.size())];
}

Action select_move(const Board& board, int player, const NegamaxConfig& config, Rng& rng) {
  return select_from_scores(negamax(board, config.depth, player, config.win_score), config, rng);
}

}  // namespace c4q
