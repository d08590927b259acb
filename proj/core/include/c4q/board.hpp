#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace c4q {

inline constexpr int kRows = 6;
inline constexpr int kCols = 7;
inline constexpr int kCells = kRows * kCols;

// A Connect Four position. Cells hold +1 (player 1), -1 (player 2) or 0.
// Row 0 is the bottom row; cell(r, c) is row r, column c.
class Board {
 public:
  constexpr Board() = default;

  constexpr int cell(int row, int col) const { return cells_[row * kCols + col]; }
  constexpr void set(int row, int col, int value) { cells_[row * kCols + col] = static_cast<std::int8_t>(value); }

  // Number of discs in a column.
  int height(int col) const;
  bool column_full(int col) const { return cell(kRows - 1, col) != 0; }
  bool full() const;
  int disc_count() const;

  // Gravity and piece-balance invariants.
  bool valid() const;

  const std::array<std::int8_t, kCells>& cells() const { return cells_; }

  friend bool operator==(const Board&, const Board&) = default;

 private:
  std::array<std::int8_t, kCells> cells_{};
};

struct Action {
  int column = 0;
  friend auto operator<=>(const Action&, const Action&) = default;
};

// Per-action scalar (Q values, scores), ordered by column.
using ActionValues = std::map<Action, double>;

enum class Outcome { Ongoing, Win1, Win2, Draw };

using StateKey = std::uint64_t;

// Columns that can still take a disc, ascending.
std::vector<Action> legal_actions(const Board& board);

// Drops `player` (+1 or -1) into `action.column`. Throws IllegalMove if the
// column is full or out of range. Does not enforce turn order.
Board apply_action(const Board& board, Action action, int player);

Outcome outcome(const Board& board);
inline bool is_terminal(Outcome o) { return o != Outcome::Ongoing; }

// +1 win, 0.5 draw, -1 loss, 0 while the game is undecided.
double reward(Outcome o, int perspective);

// Exact 49-bit encoding: per column, 7 bits holding the discs (1 = player 1)
// below a sentinel bit at the column height. Injective on valid boards.
StateKey state_key(const Board& board);

// The player to move, by disc parity (+1 when counts are equal).
int side_to_move(const Board& board);

// Text form: 6 lines of 7 characters from ".XO", top row first, each line
// terminated by '\n'. X is player 1.
std::string to_text(const Board& board);
Board from_text(std::string_view text);

// The 69 length-4 lines of the board, as cell index quadruples.
const std::vector<std::array<int, 4>>& winning_lines();

std::string_view to_string(Outcome o);

}  // namespace c4q
