#pragma once

// Brute-force reference implementations used to validate the environments
// and learners. Compiled into a separate library (qrl_oracles) that the
// production targets never link.

#include <array>
#include <optional>
#include <set>
#include <vector>

#include "qrl/fifteen.hpp"
#include "qrl/minesweeper.hpp"
#include "qrl/sudoku.hpp"

namespace qrl::oracles {

// Tiny explicit MDP for learner fixtures. Transitions are total over
// (s, a); terminal states self-loop with zero reward.
struct TinyMDP {
    struct Arc {
        int next = 0;
        double reward = 0.0;
    };
    int states = 0;
    int actions = 0;
    std::vector<Arc> arcs;          // states * actions, row-major by state
    std::vector<bool> terminal;     // per state
    double discount = 0.9;

    const Arc& arc(int s, int a) const { return arcs[static_cast<std::size_t>(s * actions + a)]; }
    void validate() const;
};

struct ValueIterationResult {
    std::vector<double> values;
    std::vector<int> policy; // greedy, ties broken by lowest action index
};

ValueIterationResult value_iteration(const TinyMDP& mdp, double tolerance = 1e-10);

// Shortest move sequence to the goal via breadth-first search, or nullopt
// when the board is unsolvable (odd-permutation instances) or the depth
// cap is exhausted (throws in that case).
std::optional<std::vector<Slide>> bfs_solve_sliding(const SlidingBoard& board, int max_depth = 20);

// Independent parity test (inversion count + blank row rule).
bool sliding_solvable(const SlidingBoard& board);

struct RevealOracleResult {
    bool mine = false;           // loss marker: the picked cell was mined
    std::set<int> revealed;      // cells revealed by the pick
};

// BFS over the zero-count component plus fringe; recomputes neighbor
// counts from the mine layout rather than trusting MineField::counts.
RevealOracleResult minesweeper_reveal_oracle(const MineField& field, int cell);

struct SudokuBacktrackResult {
    bool valid = false; // false for unsolvable or multi-solution grids
    SudokuGrid solution;
    int guesses = 0;    // branch points after exhausting naked singles
};

SudokuBacktrackResult sudoku_backtrack(const SudokuGrid& grid);

// Canonical 2048 merge semantics, tile-stepping formulation.
// dir_left = true merges toward index 0.
std::array<int, 4> merge_row_oracle(std::array<int, 4> row, bool dir_left);

} // namespace qrl::oracles
