#pragma once

#include <cstdint>
#include <limits>
#include <map>

#include "c4q/board.hpp"
#include "c4q/rng.hpp"

namespace c4q {

struct NegamaxConfig {
  int depth = 2;
  double omega = 0.3;
  int win_score = 10'000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Root scores from the mover's perspective.
struct ScoredMoves {
  std::map<Action, int> scores;
  int best_score = std::numeric_limits<int>::min();

  // Highest score, lowest column on ties.
  Action best_action() const;
};

// Sum over the twelve 4x4 windows of the doubled extreme line sums (max if
// above 1, min if below -1). Each window contributes its 4 rows, 4 columns and
// 2 diagonals. Positive favours `player`.
int heuristic_eval(const Board& board, int player);

// Negamax with alpha-beta below the root. Every root action is searched with
// a full window so all root scores are exact. Terminal children score
// +-(win_score - ply), draws 0, horizon leaves use heuristic_eval.
// Throws NoLegalMoves on a terminal or full board.
ScoredMoves negamax(const Board& board, int depth, int player, int win_score = 10'000);

// Reference search with no pruning anywhere; same scoring rules.
ScoredMoves minimax_reference(const Board& board, int depth, int player, int win_score = 10'000);

// Critical roots have a best score inside the terminal band.
bool is_critical(const ScoredMoves& moves, const NegamaxConfig& config);

// Randomized Negamax move choice. In non-critical positions, with
// probability omega picks uniformly among positive-score moves (or among all
// moves when none is positive); otherwise plays the best move.
Action select_move(const Board& board, int player, const NegamaxConfig& config, Rng& rng);

// Same, reusing already computed root scores.
Action select_from_scores(const ScoredMoves& moves, const NegamaxConfig& config, Rng& rng);

}  // namespace c4q
