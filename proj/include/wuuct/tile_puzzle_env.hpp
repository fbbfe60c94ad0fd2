#pragma once

#include <cstdint>
#include <vector>

#include "wuuct/env.hpp"

namespace wuuct {

struct TilePuzzleParams {
  std::uint32_t width = 6;
  std::uint32_t height = 6;
  std::uint32_t colors = 4;
  std::uint32_t step_budget = 10;
  std::uint32_t goal = 24;  // cells to eliminate
  std::uint64_t seed = 1;
};

// Deterministic tap-elimination game. Action y*width + x taps cell (x, y),
// with y = 0 the bottom row. Tapping removes the maximal 4-connected
// same-colour group when it has at least two cells; survivors fall down their
// column. Every tap costs one step. The episode ends with reward 1 once
// `goal` cells are gone, or with reward 0 when the budget runs out. Taps on
// empty cells or singletons are legal no-ops that still consume a step.
class TilePuzzleEnv final : public Environment {
 public:
  static constexpr std::uint8_t kEmpty = 0;

  struct Snapshot final : EnvState {
    std::vector<std::uint8_t> cells;  // colour per cell, kEmpty or 1..colors
    std::uint32_t steps_used = 0;
    std::uint32_t eliminated = 0;
    bool done = false;

    std::unique_ptr<EnvState> duplicate() const override {
      return std::make_unique<Snapshot>(*this);
    }
  };

  explicit TilePuzzleEnv(TilePuzzleParams params);

  // Fixed board, rows listed bottom row first. Cells hold colours 1..colors.
  TilePuzzleEnv(TilePuzzleParams params, std::vector<std::uint8_t> board);

  std::string name() const override { return "tile-puzzle"; }
  std::uint32_t action_count() const override { return params_.width * params_.height; }
  State initial_state() const override;
  bool is_terminal(const State& state) const override;
  StepOutcome step(const State& state, ActionId action) const override;
  std::vector<std::uint8_t> serialize(const State& state) const override;
  State deserialize(std::span<const std::uint8_t> bytes) const override;
  std::unique_ptr<Environment> clone() const override;

  const TilePuzzleParams& params() const { return params_; }
  const std::vector<std::uint8_t>& board() const { return board_; }

  // Cells of the same-colour group containing `cell`, empty for empty cells.
  std::vector<std::uint32_t> group_at(const std::vector<std::uint8_t>& cells,
                                      std::uint32_t cell) const;

 private:
  TilePuzzleParams params_;
  std::vector<std::uint8_t> board_;
};

}  // namespace wuuct
