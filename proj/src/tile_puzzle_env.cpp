#include "wuuct/tile_puzzle_env.hpp"

#include <algorithm>

#include "wuuct/bytes.hpp"

namespace wuuct {

namespace {

void validate(const TilePuzzleParams& p) {
  if (p.width == 0 || p.height == 0) throw ConfigError("tile puzzle needs a non-empty grid");
  if (p.width > 255 || p.height > 255) throw ConfigError("tile puzzle grid too large");
  if (p.colors < 2 || p.colors > 250) throw ConfigError("tile puzzle needs 2..250 colours");
  if (p.step_budget == 0) throw ConfigError("tile puzzle needs a positive step budget");
  if (p.goal == 0 || p.goal > p.width * p.height) {
    throw ConfigError("tile puzzle goal must be in [1, width*height]");
  }
}

}  // namespace

TilePuzzleEnv::TilePuzzleEnv(TilePuzzleParams params) : params_(params) {
  validate(params_);
  board_.resize(static_cast<std::size_t>(params_.width) * params_.height);
  const std::uint64_t base = mix64(params_.seed);
  for (std::size_t i = 0; i < board_.size(); ++i) {
    board_[i] = static_cast<std::uint8_t>(1 + mix64(base + i) % params_.colors);
  }
}

TilePuzzleEnv::TilePuzzleEnv(TilePuzzleParams params, std::vector<std::uint8_t> board)
    : params_(params), board_(std::move(board)) {
  validate(params_);
  if (board_.size() != static_cast<std::size_t>(params_.width) * params_.height) {
    throw ConfigError("board size does not match width*height");
  }
  for (auto c : board_) {
    if (c == kEmpty || c > params_.colors) throw ConfigError("board colour out of range");
  }
}

State TilePuzzleEnv::initial_state() const {
  auto s = std::make_unique<Snapshot>();
  s->cells = board_;
  return State(std::move(s));
}

bool TilePuzzleEnv::is_terminal(const State& state) const { return state.as<Snapshot>().done; }

std::vector<std::uint32_t> TilePuzzleEnv::group_at(const std::vector<std::uint8_t>& cells,
                                                   std::uint32_t cell) const {
  std::vector<std::uint32_t> group;
  const std::uint8_t colour = cells[cell];
  if (colour == kEmpty) return group;
  const std::uint32_t w = params_.width;
  const std::uint32_t h = params_.height;
  std::vector<bool> seen(cells.size(), false);
  std::vector<std::uint32_t> stack{cell};
  seen[cell] = true;
  while (!stack.empty()) {
    const std::uint32_t c = stack.back();
    stack.pop_back();
    group.push_back(c);
    const std::uint32_t x = c % w;
    const std::uint32_t y = c / w;
    auto visit = [&](std::uint32_t n) {
      if (!seen[n] && cells[n] == colour) {
        seen[n] = true;
        stack.push_back(n);
      }
    };
    if (x > 0) visit(c - 1);
    if (x + 1 < w) visit(c + 1);
    if (y > 0) visit(c - w);
    if (y + 1 < h) visit(c + w);
  }
  std::sort(group.begin(), group.end());
  return group;
}

StepOutcome TilePuzzleEnv::step(const State& state, ActionId action) const {
  check_step(state, action);
  auto next = std::make_unique<Snapshot>(state.as<Snapshot>());
  next->steps_used += 1;

  const auto group = group_at(next->cells, action.value);
  if (group.size() >= 2) {
    for (auto c : group) next->cells[c] = kEmpty;
    next->eliminated += static_cast<std::uint32_t>(group.size());
    // Gravity: compact each column towards y = 0.
    const std::uint32_t w = params_.width;
    for (std::uint32_t x = 0; x < w; ++x) {
      std::uint32_t write = 0;
      for (std::uint32_t y = 0; y < params_.height; ++y) {
        const std::uint8_t c = next->cells[y * w + x];
        if (c == kEmpty) continue;
        next->cells[write * w + x] = c;
        if (write != y) next->cells[y * w + x] = kEmpty;
        ++write;
      }
    }
  }

  double reward = 0.0;
  if (next->eliminated >= params_.goal) {
    next->done = true;
    reward = 1.0;
  } else if (next->steps_used >= params_.step_budget) {
    next->done = true;
  }
  const bool terminal = next->done;
  return StepOutcome{State(std::move(next)), reward, terminal};
}

// Payload: u16 steps_used, u16 eliminated, u8 done, width*height colour bytes.
std::vector<std::uint8_t> TilePuzzleEnv::serialize(const State& state) const {
  const auto& s = state.as<Snapshot>();
  ByteWriter w;
  w.u8(kStateFormatVersion);
  w.u16(static_cast<std::uint16_t>(s.steps_used));
  w.u16(static_cast<std::uint16_t>(s.eliminated));
  w.u8(s.done ? 1 : 0);
  w.raw(s.cells);
  return w.take();
}

State TilePuzzleEnv::deserialize(std::span<const std::uint8_t> bytes) const {
  ByteReader r(bytes);
  if (r.u8() != kStateFormatVersion) throw SerializationError("unknown state version");
  auto s = std::make_unique<Snapshot>();
  s->steps_used = r.u16();
  s->eliminated = r.u16();
  s->done = r.u8() != 0;
  const auto cells = r.raw(board_.size());
  s->cells.assign(cells.begin(), cells.end());
  r.expect_end();
  return State(std::move(s));
}

std::unique_ptr<Environment> TilePuzzleEnv::clone() const {
  return std::make_unique<TilePuzzleEnv>(*this);
}

}  // namespace wuuct
