#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qrl/env.hpp"
#include "qrl/rng.hpp"

namespace qrl {

// 9x9 grid; 0 = empty. Given cells never change after reset.
struct SudokuGrid {
    std::array<int, 81> cells{};
    std::array<bool, 81> givens{};

    static SudokuGrid from_line(const std::string& line81);
    std::string to_line() const;

    int filled_count() const;
    bool consistent_placement(int row, int col, int v) const;
    bool fully_consistent() const;
};

struct SudokuAnalysis {
    bool solvable = false;
    bool unique = false;
    int guesses = 0; // branch points on the successful path, after
                     // exhausting naked-single propagation before each branch
    SudokuGrid solution;
};

// Propagation + backtracking solver used for difficulty classification and
// puzzle generation.
SudokuAnalysis analyze_sudoku(const SudokuGrid& puzzle);

// Puzzle generation: a random complete grid with `81 - holes` givens that
// has a unique solution. When `level` is set, regenerates until the guess
// count falls in the requested class.
SudokuGrid generate_sudoku(Rng& rng, int givens,
                           std::optional<DifficultyClass::Level> level = std::nullopt,
                           int max_attempts = 10000);

// Puzzle source file: one puzzle per line, 81 chars, '0' or '.' for blanks,
// optional ",<solution81>" suffix ignored.
std::vector<SudokuGrid> load_sudoku_file(const std::string& path);

struct SudokuConfig {
    std::vector<SudokuGrid> puzzles;                     // pre-classified pool
    std::optional<DifficultyClass::Level> level;         // filter on the pool
    bool write_violations = false;                       // keep rejected digits on the board
    int move_threshold = 162;                            // 81 * 2
};

class SudokuEnv : public Env {
public:
    explicit SudokuEnv(SudokuConfig cfg);

    GameId game() const override { return GameId::Sudoku; }
    int action_count() const override { return 810; }
    std::array<int, 3> observation_shape() const override { return {9, 9, 10}; }

    Tensor reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    Terminal terminal() const override { return terminal_; }
    std::string state_key() const override { return grid_.to_line(); }

    std::vector<std::uint8_t> compact_state() const override;
    Tensor decode_observation(const std::vector<std::uint8_t>& compact) const override;

    const SudokuGrid& grid() const { return grid_; }
    int moves_taken() const { return moves_; }

private:
    SudokuConfig cfg_;
    std::vector<std::size_t> pool_; // indices into cfg_.puzzles matching the filter
    SudokuGrid grid_;
    Terminal terminal_ = Terminal::Ongoing;
    int moves_ = 0;
};

} // namespace qrl
