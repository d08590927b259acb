#include "c4q/board.hpp"

#include <sstream>

#include "c4q/errors.hpp"

namespace c4q {

int Board::height(int col) const {
  int h = 0;
  while (h < kRows && cell(h, col) != 0) ++h;
  return h;
}

bool Board::full() const {
  for (int c = 0; c < kCols; ++c) {
    if (!column_full(c)) return false;
  }
  return true;
}

int Board::disc_count() const {
  int n = 0;
  for (auto v : cells_) n += v != 0;
  return n;
}

bool Board::valid() const {
  int ones = 0;
  int twos = 0;
  for (int c = 0; c < kCols; ++c) {
    bool empty_seen = false;
    for (int r = 0; r < kRows; ++r) {
      int v = cell(r, c);
      if (v == 0) {
        empty_seen = true;
      } else {
        if (empty_seen || (v != 1 && v != -1)) return false;
        (v == 1 ? ones : twos)++;
      }
    }
  }
  return ones - twos == 0 || ones - twos == 1;
}

std::vector<Action> legal_actions(const Board& board) {
  std::vector<Action> out;
  out.reserve(kCols);
  for (int c = 0; c < kCols; ++c) {
    if (!board.column_full(c)) out.push_back(Action{c});
  }
  return out;
}

Board apply_action(const Board& board, Action action, int player) {
  if (action.column < 0 || action.column >= kCols) {
    throw IllegalMove("column " + std::to_string(action.column) + " out of range");
  }
  if (board.column_full(action.column)) {
    throw IllegalMove("column " + std::to_string(action.column) + " is full");
  }
  Board next = board;
  next.set(board.height(action.column), action.column, player);
  return next;
}

const std::vector<std::array<int, 4>>& winning_lines() {
  static const std::vector<std::array<int, 4>> lines = [] {
    std::vector<std::array<int, 4>> out;
    constexpr int dirs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
    for (const auto& d : dirs) {
      for (int r = 0; r < kRows; ++r) {
        for (int c = 0; c < kCols; ++c) {
          int er = r + 3 * d[0];
          int ec = c + 3 * d[1];
          if (er < 0 || er >= kRows || ec < 0 || ec >= kCols) continue;
          std::array<int, 4> line{};
          for (int k = 0; k < 4; ++k) line[k] = (r + k * d[0]) * kCols + (c + k * d[1]);
          out.push_back(line);
        }
      }
    }
    return out;
  }();
  return lines;
}

Outcome outcome(const Board& board) {
  const auto& cells = board.cells();
  for (const auto& line : winning_lines()) {
    int first = cells[line[0]];
    if (first == 0) continue;
    if (cells[line[1]] == first && cells[line[2]] == first && cells[line[3]] == first) {
      return first == 1 ? Outcome::Win1 : Outcome::Win2;
    }
  }
  return board.full() ? Outcome::Draw : Outcome::Ongoing;
}

double reward(Outcome o, int perspective) {
  switch (o) {
    case Outcome::Win1:
      return perspective == 1 ? 1.0 : -1.0;
    case Outcome::Win2:
      return perspective == -1 ? 1.0 : -1.0;
    case Outcome::Draw:
      return 0.5;
    case Outcome::Ongoing:
      break;
  }
  return 0.0;
}

StateKey state_key(const Board& board) {
  StateKey key = 0;
  for (int c = 0; c < kCols; ++c) {
    StateKey column = 0;
    int h = 0;
    for (; h < kRows && board.cell(h, c) != 0; ++h) {
      if (board.cell(h, c) == 1) column |= StateKey{1} << h;
    }
    column |= StateKey{1} << h;  // sentinel
    key |= column << (7 * c);
  }
  return key;
}

int side_to_move(const Board& board) {
  int sum = 0;
  for (auto v : board.cells()) sum += v;
  return sum == 0 ? 1 : -1;
}

std::string to_text(const Board& board) {
  std::string out;
  out.reserve(kRows * (kCols + 1));
  for (int r = kRows - 1; r >= 0; --r) {
    for (int c = 0; c < kCols; ++c) {
      int v = board.cell(r, c);
      out.push_back(v == 1 ? 'X' : v == -1 ? 'O' : '.');
    }
    out.push_back('\n');
  }
  return out;
}

Board from_text(std::string_view text) {
  Board board;
  std::istringstream in{std::string(text)};
  std::string line;
  int r = kRows - 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (r < 0) throw FormatError("board text has more than 6 rows");
    if (line.size() != static_cast<std::size_t>(kCols)) {
      throw FormatError("board row must have 7 characters: '" + line + "'");
    }
    for (int c = 0; c < kCols; ++c) {
      switch (line[c]) {
        case 'X': board.set(r, c, 1); break;
        case 'O': board.set(r, c, -1); break;
        case '.': break;
        default: throw FormatError(std::string("unexpected board character '") + line[c] + "'");
      }
    }
    --r;
  }
  if (r != -1) throw FormatError("board text must have exactly 6 rows");
  return board;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Win1: return "win1";
    case Outcome::Win2: return "win2";
    case Outcome::Draw: return "draw";
    case Outcome::Ongoing: return "ongoing";
  }
  return "ongoing";
}

}  // namespace c4q
