#pragma once

#include <string>
#include <vector>

#include "qrl/env.hpp"
#include "qrl/rng.hpp"

namespace qrl {

// Sliding-action directions: the *blank* moves in the given direction.
enum class Slide { Up = 0, Right = 1, Down = 2, Left = 3 };

inline int inverse_slide(int a) { return (a + 2) % 4; }

// n x n sliding puzzle board. cells is a permutation of {0..n*n-1},
// 0 is the blank. Tile t's home is index t-1; the blank's home is the
// last cell.
struct SlidingBoard {
    int n = 4;
    std::vector<int> cells;

    static SlidingBoard solved(int n);
    static SlidingBoard from_key(const std::string& key);

    bool is_solved() const;
    int blank_pos() const;
    int tile_pos(int tile) const;

    // Applies the slide; returns false (state unchanged) when the blank
    // is at the border in that direction.
    bool apply(Slide a);

    int manhattan_sum() const;
    int correct_tiles() const;
    bool solvable() const;
    std::string key() const;

    bool operator==(const SlidingBoard& o) const { return n == o.n && cells == o.cells; }
};

enum class FifteenRewards {
    Original, // +1/-1 progress, +15 win, -15 at the move budget
    Sparse    // +1 terminal win, 0 otherwise (tiny-board experiments)
};

struct FifteenConfig {
    int n = 4;
    DifficultyClass::Level level = DifficultyClass::Level::Easy;
    FifteenRewards rewards = FifteenRewards::Original;
    int move_budget = 0; // 0 -> (n*n)^2
};

class FifteenEnv : public Env {
public:
    explicit FifteenEnv(FifteenConfig cfg = {});

    GameId game() const override { return GameId::Fifteen; }
    int action_count() const override { return 4; }
    std::array<int, 3> observation_shape() const override { return {cfg_.n, cfg_.n, 1}; }

    Tensor reset(std::uint64_t seed) override;
    // Start from an explicit board (solve15 CLI, tests). The board must be
    // a valid permutation.
    Tensor reset_to(const SlidingBoard& board);

    StepResult step(int action) override;
    Terminal terminal() const override { return terminal_; }
    std::string state_key() const override { return board_.key(); }

    std::vector<std::uint8_t> compact_state() const override;
    Tensor decode_observation(const std::vector<std::uint8_t>& compact) const override;

    const SlidingBoard& board() const { return board_; }
    int moves_taken() const { return moves_; }
    int move_budget() const { return budget_; }

    // Shuffle a solved board by random legal moves until the Manhattan
    // distance sum hits a target drawn from the difficulty band.
    static SlidingBoard shuffled_board(int n, DifficultyClass::Level level, Rng& rng);

private:
    FifteenConfig cfg_;
    int budget_;
    SlidingBoard board_;
    Terminal terminal_ = Terminal::Ongoing;
    int moves_ = 0;
};

} // namespace qrl
