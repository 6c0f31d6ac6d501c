#include "doctest.h"

#include <cmath>

#include "qrl/oracles.hpp"

using namespace qrl;
using namespace qrl::oracles;

namespace {

// Deterministic chain 0 -> 1 -> ... -> length, with terminal at the end.
// Action 0 advances (reward 1 on the final hop), action 1 stays.
TinyMDP chain_mdp(int length, double discount) {
    TinyMDP mdp;
    mdp.states = length + 1;
    mdp.actions = 2;
    mdp.discount = discount;
    mdp.terminal.assign(static_cast<std::size_t>(mdp.states), false);
    mdp.terminal.back() = true;
    mdp.arcs.resize(static_cast<std::size_t>(mdp.states * mdp.actions));
    for (int s = 0; s < mdp.states; ++s) {
        const int next = s == length ? s : s + 1;
        mdp.arcs[static_cast<std::size_t>(s * 2)] = {next, next == length && s != length ? 1.0 : 0.0};
        mdp.arcs[static_cast<std::size_t>(s * 2 + 1)] = {s, 0.0};
    }
    return mdp;
}

} // namespace

TEST_SUITE("oracles") {

TEST_CASE("value iteration solves the reward-at-the-end chain exactly") {
    const TinyMDP mdp = chain_mdp(4, 0.9);
    mdp.validate();
    const ValueIterationResult res = value_iteration(mdp, 1e-12);
    REQUIRE(res.values.size() == 5);
    // V(s) = gamma^(hops-1) for the single +1 at the final hop.
    for (int s = 0; s < 4; ++s)
        CHECK(res.values[static_cast<std::size_t>(s)] ==
              doctest::Approx(std::pow(0.9, 3 - s)).epsilon(1e-12));
    CHECK(res.values[4] == 0.0); // terminal
    for (int s = 0; s < 4; ++s) CHECK(res.policy[static_cast<std::size_t>(s)] == 0);
}

TEST_CASE("value iteration breaks ties toward the lowest action index") {
    TinyMDP mdp;
    mdp.states = 2;
    mdp.actions = 2;
    mdp.discount = 0.5;
    mdp.terminal = {false, true};
    // Both actions reach the terminal with the same reward.
    mdp.arcs = {{1, 2.0}, {1, 2.0}, {1, 0.0}, {1, 0.0}};
    const ValueIterationResult res = value_iteration(mdp);
    CHECK(res.values[0] == 2.0);
    CHECK(res.policy[0] == 0);
}

TEST_CASE("malformed tiny MDPs are rejected") {
    TinyMDP mdp = chain_mdp(2, 0.9);
    mdp.arcs[0].next = 99; // out-of-range transition
    CHECK_THROWS(mdp.validate());
    TinyMDP empty;
    CHECK_THROWS(empty.validate());
}

TEST_CASE("BFS returns the empty path on a solved board") {
    const auto path = bfs_solve_sliding(SlidingBoard::solved(3));
    REQUIRE(path.has_value());
    CHECK(path->empty());
}

TEST_CASE("BFS paths are valid and no shorter path exists") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const SlidingBoard start = FifteenEnv::shuffled_board(3, DifficultyClass::Level::Easy, rng);
        const auto path = bfs_solve_sliding(start);
        REQUIRE(path.has_value());
        // Manhattan distance is a lower bound on moves.
        CHECK(static_cast<int>(path->size()) >= start.manhattan_sum());
        SlidingBoard b = start;
        for (Slide s : *path) CHECK(b.apply(s));
        CHECK(b.is_solved());
    }
}

TEST_CASE("BFS reports unsolvable boards as nullopt") {
    SlidingBoard b = SlidingBoard::solved(3);
    std::swap(b.cells[0], b.cells[1]); // odd permutation
    CHECK(!sliding_solvable(b));
    CHECK(!bfs_solve_sliding(b).has_value());
}

TEST_CASE("BFS throws when the depth cap is exhausted") {
    Rng rng(43);
    const SlidingBoard hard = FifteenEnv::shuffled_board(4, DifficultyClass::Level::Hard, rng);
    CHECK_THROWS(bfs_solve_sliding(hard, 4));
}

TEST_CASE("reveal oracle flags mined picks") {
    Rng rng(47);
    const MineField f = MineField::random(8, 8, 0.2, rng);
    for (int i = 0; i < f.cells(); ++i) {
        const RevealOracleResult r = minesweeper_reveal_oracle(f, i);
        CHECK(r.mine == static_cast<bool>(f.mines[static_cast<std::size_t>(i)]));
        if (r.mine) CHECK(r.revealed.empty());
    }
}

TEST_CASE("reveal oracle on a hand-built field") {
    // 3x3, single mine in the center: every outer cell has count 1, so each
    // pick reveals exactly itself.
    MineField f;
    f.n = f.m = 3;
    f.mines.assign(9, false);
    f.revealed.assign(9, false);
    f.counts.assign(9, 0); // oracle recomputes counts itself
    f.mines[4] = true;
    for (int i = 0; i < 9; ++i) {
        if (i == 4) continue;
        const RevealOracleResult r = minesweeper_reveal_oracle(f, i);
        CHECK(!r.mine);
        CHECK(r.revealed == std::set<int>{i});
    }
}

TEST_CASE("merge oracle worked examples") {
    CHECK(merge_row_oracle({1, 1, 0, 0}, true) == std::array<int, 4>{2, 0, 0, 0});
    CHECK(merge_row_oracle({1, 1, 1, 1}, true) == std::array<int, 4>{2, 2, 0, 0});
    CHECK(merge_row_oracle({0, 0, 1, 1}, false) == std::array<int, 4>{0, 0, 0, 2});
    CHECK(merge_row_oracle({1, 2, 3, 4}, true) == std::array<int, 4>{1, 2, 3, 4});
}

} // TEST_SUITE
