#include "doctest.h"

#include "qrl/fifteen.hpp"
#include "qrl/oracles.hpp"

using namespace qrl;

TEST_SUITE("fifteen") {

TEST_CASE("reset easy lands in the easy distance band") {
    FifteenEnv env;
    env.reset(7);
    const int d = env.board().manhattan_sum();
    CHECK(d >= 1);
    CHECK(d < 10);
    CHECK(DifficultyClass::fifteen_level(d) == DifficultyClass::Level::Easy);
}

TEST_CASE("difficulty bands cover the distance ranges") {
    CHECK(DifficultyClass::fifteen_level(9) == DifficultyClass::Level::Easy);
    CHECK(DifficultyClass::fifteen_level(10) == DifficultyClass::Level::Medium);
    CHECK(DifficultyClass::fifteen_level(29) == DifficultyClass::Level::Medium);
    CHECK(DifficultyClass::fifteen_level(30) == DifficultyClass::Level::Hard);
}

TEST_CASE("shuffled boards per level stay in band and solvable") {
    Rng rng(11);
    for (auto level : {DifficultyClass::Level::Easy, DifficultyClass::Level::Medium,
                       DifficultyClass::Level::Hard}) {
        for (int i = 0; i < 20; ++i) {
            const SlidingBoard b = FifteenEnv::shuffled_board(4, level, rng);
            CHECK(DifficultyClass::fifteen_level(b.manhattan_sum()) == level);
            CHECK(b.solvable());
            CHECK(oracles::sliding_solvable(b));
        }
    }
}

TEST_CASE("border push leaves the state unchanged at reward -1") {
    FifteenEnv env;
    SlidingBoard b = SlidingBoard::solved(4);
    b.apply(Slide::Up); // blank now at (2,3); board one move from solved
    env.reset_to(b);
    const std::string before = env.state_key();
    const StepResult r = env.step(static_cast<int>(Slide::Right)); // off-board
    CHECK(env.state_key() == before);
    CHECK(r.reward == -1.0);
    CHECK(r.terminal == Terminal::Ongoing);
}

TEST_CASE("solving move pays +15 and wins") {
    FifteenEnv env;
    SlidingBoard b = SlidingBoard::solved(4);
    b.apply(Slide::Up);
    env.reset_to(b);
    const StepResult r = env.step(static_cast<int>(Slide::Down));
    CHECK(r.reward == 15.0);
    CHECK(r.terminal == Terminal::Win);
    CHECK_THROWS(env.step(0)); // no step after terminal
}

TEST_CASE("a solved start is terminal immediately") {
    FifteenEnv env;
    env.reset_to(SlidingBoard::solved(4));
    CHECK(env.terminal() == Terminal::Win);
}

TEST_CASE("swapping tiles 1 and 2 gives Manhattan sum 2, class easy") {
    SlidingBoard b = SlidingBoard::solved(4);
    std::swap(b.cells[0], b.cells[1]);
    CHECK(b.manhattan_sum() == 2);
    CHECK(DifficultyClass::fifteen_level(b.manhattan_sum()) == DifficultyClass::Level::Easy);
}

TEST_CASE("progress moves pay +1, regress moves pay -1") {
    FifteenEnv env;
    SlidingBoard b = SlidingBoard::solved(4);
    b.apply(Slide::Up);
    b.apply(Slide::Left); // two moves out; next Right then Down re-solves
    env.reset_to(b);
    const int correct0 = env.board().correct_tiles();
    const StepResult r1 = env.step(static_cast<int>(Slide::Right));
    CHECK(env.board().correct_tiles() > correct0);
    CHECK(r1.reward == 1.0);
    const StepResult r2 = env.step(static_cast<int>(Slide::Left)); // undo: regress
    CHECK(r2.reward == -1.0);
}

TEST_CASE("budget exhaustion pays -15 and loses") {
    FifteenConfig cfg;
    cfg.move_budget = 3;
    FifteenEnv env(cfg);
    SlidingBoard b = SlidingBoard::solved(4);
    b.apply(Slide::Up);
    b.apply(Slide::Up);
    b.apply(Slide::Up);
    env.reset_to(b);
    env.step(static_cast<int>(Slide::Up));   // border no-op
    env.step(static_cast<int>(Slide::Up));
    const StepResult r = env.step(static_cast<int>(Slide::Up));
    CHECK(r.reward == -15.0);
    CHECK(r.terminal == Terminal::Loss);
}

TEST_CASE("board stays a permutation; inverse action restores the state") {
    Rng rng(3);
    SlidingBoard b = FifteenEnv::shuffled_board(4, DifficultyClass::Level::Medium, rng);
    for (int trial = 0; trial < 200; ++trial) {
        const SlidingBoard before = b;
        const int a = static_cast<int>(rng.below(4));
        const bool changed = b.apply(static_cast<Slide>(a));
        std::vector<bool> seen(16, false);
        for (int v : b.cells) {
            CHECK(v >= 0);
            CHECK(v < 16);
            CHECK(!seen[static_cast<std::size_t>(v)]);
            seen[static_cast<std::size_t>(v)] = true;
        }
        if (changed) {
            SlidingBoard undo = b;
            CHECK(undo.apply(static_cast<Slide>(inverse_slide(a))));
            CHECK(undo == before);
        } else {
            CHECK(b == before);
        }
    }
}

TEST_CASE("solvability agrees with the inversion-rule oracle") {
    Rng rng(17);
    // Random permutations, solvable or not.
    for (int trial = 0; trial < 300; ++trial) {
        SlidingBoard b = SlidingBoard::solved(4);
        for (std::size_t i = b.cells.size(); i > 1; --i)
            std::swap(b.cells[i - 1], b.cells[rng.below(i)]);
        CHECK(b.solvable() == oracles::sliding_solvable(b));
    }
}

TEST_CASE("sparse scheme pays only the terminal win") {
    FifteenConfig cfg;
    cfg.rewards = FifteenRewards::Sparse;
    FifteenEnv env(cfg);
    SlidingBoard b = SlidingBoard::solved(4);
    b.apply(Slide::Up);
    env.reset_to(b);
    const StepResult r1 = env.step(static_cast<int>(Slide::Right)); // off-board
    CHECK(r1.reward == 0.0);
    const StepResult r2 = env.step(static_cast<int>(Slide::Down));
    CHECK(r2.reward == 1.0);
    CHECK(r2.terminal == Terminal::Win);
}

TEST_CASE("identical seed and actions reproduce identical step results") {
    for (int run = 0; run < 2; ++run) {
        static std::vector<std::string> keys[2];
        static std::vector<double> rewards[2];
        FifteenEnv env;
        env.reset(99);
        Rng actions(5);
        for (int i = 0; i < 50 && env.terminal() == Terminal::Ongoing; ++i) {
            const StepResult r = env.step(static_cast<int>(actions.below(4)));
            keys[run].push_back(env.state_key());
            rewards[run].push_back(r.reward);
        }
        if (run == 1) {
            CHECK(keys[0] == keys[1]);
            CHECK(rewards[0] == rewards[1]);
        }
    }
}

TEST_CASE("compact state decodes to the raw tile observation") {
    FifteenEnv env;
    env.reset(4);
    const Tensor obs = env.observation();
    CHECK(obs.shape == std::vector<int>{4, 4, 1});
    for (int i = 0; i < 16; ++i)
        CHECK(obs.data[static_cast<std::size_t>(i)] ==
              static_cast<double>(env.board().cells[static_cast<std::size_t>(i)]));
}

} // TEST_SUITE
