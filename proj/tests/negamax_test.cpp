#include "c4q/negamax.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "c4q/errors.hpp"
#include "test_util.hpp"

namespace c4q {
namespace {

using Cell = std::pair<int, int>;  // (row, col)

// Brute-force heuristic: list every 4x4 window and its ten lines explicitly.
int oracle_heuristic(const Board& b, int player) {
  int max_h = 0;
  int min_h = 0;
  for (int r = 0; r <= kRows - 4; ++r) {
    for (int c = 0; c <= kCols - 4; ++c) {
      std::vector<std::array<Cell, 4>> lines;
      for (int k = 0; k < 4; ++k) {
        lines.push_back({Cell{r + k, c}, Cell{r + k, c + 1}, Cell{r + k, c + 2}, Cell{r + k, c + 3}});
        lines.push_back({Cell{r, c + k}, Cell{r + 1, c + k}, Cell{r + 2, c + k}, Cell{r + 3, c + k}});
      }
      lines.push_back({Cell{r, c}, Cell{r + 1, c + 1}, Cell{r + 2, c + 2}, Cell{r + 3, c + 3}});
      lines.push_back({Cell{r, c + 3}, Cell{r + 1, c + 2}, Cell{r + 2, c + 1}, Cell{r + 3, c}});
      std::vector<int> sums;
      for (const auto& line : lines) {
        int s = 0;
        for (auto [rr, cc] : line) s += b.cell(rr, cc);
        sums.push_back(s);
      }
      int hi = *std::max_element(sums.begin(), sums.end());
      int lo = *std::min_element(sums.begin(), sums.end());
      if (hi > 1) max_h += 2 * hi;
      if (lo < -1) min_h += 2 * lo;
    }
  }
  int v = max_h + min_h;
  return player == 1 ? v : -v;
}

// Plain full-width minimax from the root player's point of view.
int oracle_value(const Board& b, int depth, int to_move, int root, int ply, int win_score) {
  int best = to_move == root ? std::numeric_limits<int>::min() : std::numeric_limits<int>::max();
  for (Action a : legal_actions(b)) {
    Board child = apply_action(b, a, to_move);
    Outcome o = outcome(child);
    int v;
    if (o == Outcome::Win1 || o == Outcome::Win2) {
      v = to_move == root ? win_score - ply : -(win_score - ply);
    } else if (o == Outcome::Draw) {
      v = 0;
    } else if (depth == 1) {
      v = heuristic_eval(child, root);
    } else {
      v = oracle_value(child, depth - 1, -to_move, root, ply + 1, win_score);
    }
    best = to_move == root ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

std::map<Action, int> oracle_root_scores(const Board& b, int depth, int player, int win_score = 10'000) {
  std::map<Action, int> out;
  for (Action a : legal_actions(b)) {
    Board child = apply_action(b, a, player);
    Outcome o = outcome(child);
    if (o == Outcome::Win1 || o == Outcome::Win2) {
      out[a] = win_score - 1;
    } else if (o == Outcome::Draw) {
      out[a] = 0;
    } else if (depth == 1) {
      out[a] = heuristic_eval(child, player);
    } else {
      out[a] = oracle_value(child, depth - 1, -player, player, 2, win_score);
    }
  }
  return out;
}

Board parse(const char* text) { return from_text(text); }

TEST(Heuristic, EmptyBoardIsZero) {
  EXPECT_EQ(heuristic_eval(Board{}, 1), 0);
  EXPECT_EQ(heuristic_eval(Board{}, -1), 0);
}

TEST(Heuristic, ThreeInBottomRow) {
  Board b = parse(
      ".......\n"
      ".......\n"
      ".......\n"
      ".......\n"
      ".......\n"
      "XXX....\n");
  int expected = oracle_heuristic(b, 1);
  EXPECT_GT(expected, 0);
  EXPECT_EQ(heuristic_eval(b, 1), expected);
  EXPECT_EQ(heuristic_eval(b, -1), -expected);
}

TEST(Heuristic, MatchesBruteForceAndIsAntisymmetric) {
  Rng rng(21);
  for (int i = 0; i < 3000; ++i) {
    Board b = testing::random_position(rng, static_cast<int>(uniform_index(rng, 43)));
    int v = heuristic_eval(b, 1);
    ASSERT_EQ(v, oracle_heuristic(b, 1)) << to_text(b);
    ASSERT_EQ(heuristic_eval(b, -1), -v);
  }
}

TEST(Negamax, ImmediateWinScoresHighest) {
  Board b = parse(
      ".......\n"
      ".......\n"
      ".......\n"
      "..X....\n"
      "..XO...\n"
      "..XOO..\n");
  auto moves = negamax(b, 2, 1);
  for (const auto& [a, s] : moves.scores) {
    if (a.column != 2) EXPECT_LT(s, moves.scores.at(Action{2}));
  }
  EXPECT_EQ(moves.scores.at(Action{2}), 10'000 - 1);
  EXPECT_EQ(moves.best_action().column, 2);
}

TEST(Negamax, BlockingColumnScoresStrictlyHighest) {
  Board b = parse(
      ".......\n"
      ".......\n"
      ".......\n"
      ".......\n"
      "......X\n"
      "OOO.X.X\n");
  auto moves = negamax(b, 2, 1);
  auto oracle = oracle_root_scores(b, 2, 1);
  for (const auto& [a, s] : moves.scores) {
    EXPECT_EQ(s, oracle.at(a));
    if (a.column != 3) EXPECT_LT(s, moves.scores.at(Action{3}));
  }
}

TEST(Negamax, TerminalPositionThrows) {
  Board b;
  for (int i = 0; i < 4; ++i) b = apply_action(b, Action{0}, 1);
  EXPECT_THROW(negamax(b, 2, -1), NoLegalMoves);
  NegamaxConfig cfg;
  Rng rng(1);
  EXPECT_THROW(select_move(b, -1, cfg, rng), NoLegalMoves);
}

TEST(Negamax, RootScoresMatchMinimaxOracle) {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    Board b = testing::random_ongoing_position(rng, 30);
    int player = side_to_move(b);
    auto pruned = negamax(b, 2, player);
    auto oracle = oracle_root_scores(b, 2, player);
    ASSERT_EQ(pruned.scores, (std::map<Action, int>(oracle.begin(), oracle.end())));
    ASSERT_EQ(pruned.scores, minimax_reference(b, 2, player).scores);
  }
}

TEST(Negamax, PruningIsExactAtDeeperRoots) {
  Rng rng(78);
  for (int i = 0; i < 100; ++i) {
    Board b = testing::random_ongoing_position(rng, 30);
    int player = side_to_move(b);
    for (int depth : {3, 4}) {
      auto pruned = negamax(b, depth, player);
      ASSERT_EQ(pruned.scores, oracle_root_scores(b, depth, player));
    }
  }
}

TEST(SelectMove, GuaranteedWinAlwaysChosen) {
  Board b = parse(
      ".......\n"
      ".......\n"
      ".......\n"
      "..X....\n"
      "..XO...\n"
      "..XOO..\n");
  NegamaxConfig cfg;
  cfg.omega = 1.0;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) ASSERT_EQ(select_move(b, 1, cfg, rng).column, 2);
}

TEST(SelectMove, OmegaZeroIsArgmax) {
  Rng rng(4);
  NegamaxConfig cfg;
  cfg.omega = 0.0;
  for (int i = 0; i < 200; ++i) {
    Board b = testing::random_ongoing_position(rng, 20);
    int player = side_to_move(b);
    ASSERT_EQ(select_move(b, player, cfg, rng), negamax(b, 2, player).best_action());
  }
}

TEST(SelectMove, OmegaOnePicksUniformlyAmongPositiveScores) {
  ScoredMoves moves;
  moves.scores = {{Action{0}, -5}, {Action{1}, -3}, {Action{2}, 4}, {Action{3}, 0},
                  {Action{4}, 6},  {Action{5}, -2}, {Action{6}, -1}};
  moves.best_score = 6;
  NegamaxConfig cfg;
  cfg.omega = 1.0;
  Rng rng(9);
  constexpr int kDraws = 10000;
  int counts[kCols] = {};
  for (int i = 0; i < kDraws; ++i) counts[select_from_scores(moves, cfg, rng).column]++;
  EXPECT_EQ(counts[2] + counts[4], kDraws);
  EXPECT_NEAR(counts[2] / double(kDraws), 0.5, 0.02);
  EXPECT_NEAR(counts[4] / double(kDraws), 0.5, 0.02);
}

TEST(SelectMove, OmegaOneFallsBackToAllMovesWithoutPositiveScores) {
  ScoredMoves moves;
  moves.scores = {{Action{1}, -3}, {Action{3}, 0}, {Action{5}, -2}};
  moves.best_score = 0;
  NegamaxConfig cfg;
  cfg.omega = 1.0;
  Rng rng(10);
  int counts[kCols] = {};
  for (int i = 0; i < 9000; ++i) counts[select_from_scores(moves, cfg, rng).column]++;
  for (int c : {1, 3, 5}) EXPECT_NEAR(counts[c] / 9000.0, 1.0 / 3.0, 0.02);
}

TEST(SelectMove, ForcedLossIsCriticalAndPlaysBest) {
  ScoredMoves moves;
  moves.scores = {{Action{0}, -9998}, {Action{1}, -9998}, {Action{2}, -9998}};
  moves.best_score = -9998;
  NegamaxConfig cfg;
  cfg.omega = 1.0;
  EXPECT_TRUE(is_critical(moves, cfg));
  Rng rng(1);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(select_from_scores(moves, cfg, rng).column, 0);
}

TEST(SelectMove, NeverIllegalAndDeterministicAtOmegaZero) {
  Rng rng(12);
  NegamaxConfig random_cfg;
  random_cfg.omega = 1.0;
  NegamaxConfig fixed_cfg;
  fixed_cfg.omega = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Board b = testing::random_ongoing_position(rng, 36);
    int player = side_to_move(b);
    Action a = select_move(b, player, random_cfg, rng);
    ASSERT_FALSE(b.column_full(a.column));
    Rng r1(99), r2(12345);
    ASSERT_EQ(select_move(b, player, fixed_cfg, r1), select_move(b, player, fixed_cfg, r2));
  }
}

TEST(NegamaxConfig, Validation) {
  NegamaxConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.depth = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.omega = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.win_score = 50;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace c4q
