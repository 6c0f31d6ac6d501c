#include "doctest.h"

#include "qrl/minesweeper.hpp"
#include "qrl/oracles.hpp"

using namespace qrl;

namespace {

// A safe, unrevealed cell with no revealed neighbors, or -1.
int fresh_safe_cell(const MineField& f) {
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.m; ++j) {
            const int idx = i * f.m + j;
            if (f.mines[static_cast<std::size_t>(idx)] || f.revealed[static_cast<std::size_t>(idx)])
                continue;
            bool clean = true;
            for (int di = -1; di <= 1 && clean; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (f.in_bounds(i + di, j + dj) &&
                        f.revealed[static_cast<std::size_t>((i + di) * f.m + j + dj)]) {
                        clean = false;
                        break;
                    }
                }
            if (clean) return idx;
        }
    return -1;
}

int first_mine(const MineField& f) {
    for (int i = 0; i < f.cells(); ++i)
        if (f.mines[static_cast<std::size_t>(i)]) return i;
    return -1;
}

} // namespace

TEST_SUITE("minesweeper") {

TEST_CASE("default board has 38 mines on 16x16 at density 0.15") {
    MinesweeperEnv env;
    env.reset(1);
    CHECK(env.field().n == 16);
    CHECK(env.field().m == 16);
    CHECK(env.field().mine_count() == 38); // round(0.15 * 256)
    CHECK(env.action_count() == 256);
}

TEST_CASE("class densities map to .15 / .45 / .75") {
    CHECK(MinesweeperConfig::default_density(DifficultyClass::Level::Easy) == 0.15);
    CHECK(MinesweeperConfig::default_density(DifficultyClass::Level::Medium) == 0.45);
    CHECK(MinesweeperConfig::default_density(DifficultyClass::Level::Hard) == 0.75);
    CHECK(DifficultyClass::minesweeper_level(0.15) == DifficultyClass::Level::Easy);
    CHECK(DifficultyClass::minesweeper_level(0.45) == DifficultyClass::Level::Medium);
    CHECK(DifficultyClass::minesweeper_level(0.75) == DifficultyClass::Level::Hard);
}

TEST_CASE("density outside (0,1) is rejected") {
    MinesweeperConfig cfg;
    cfg.density = 0.0;
    CHECK_THROWS(MinesweeperEnv{cfg});
    cfg.density = 1.0;
    CHECK_THROWS(MinesweeperEnv{cfg});
}

TEST_CASE("first isolated safe pick pays 0.5; repeat pick pays -0.5") {
    MinesweeperEnv env;
    env.reset(3);
    const int cell = fresh_safe_cell(env.field());
    REQUIRE(cell >= 0);
    const StepResult r1 = env.step(cell);
    CHECK(r1.reward == 0.5); // +1 progress, -0.5 once-penalty
    CHECK(r1.terminal == Terminal::Ongoing);
    REQUIRE(env.field().revealed[static_cast<std::size_t>(cell)]);
    const StepResult r2 = env.step(cell);
    CHECK(r2.reward == -0.5);
    CHECK(env.field().revealed_count() == static_cast<int>(r1.info.at("revealed_fraction") * 256));
}

TEST_CASE("pick next to a revealed cell skips the once-penalty") {
    MinesweeperEnv env;
    env.reset(3);
    // A numbered cell (count > 0 reveals only itself) with a safe neighbor.
    const MineField& f = env.field();
    int a = -1, b = -1;
    for (int i = 0; i < 16 && a < 0; ++i)
        for (int j = 0; j < 16 && a < 0; ++j) {
            const int idx = i * 16 + j;
            if (f.mines[static_cast<std::size_t>(idx)] ||
                f.counts[static_cast<std::size_t>(idx)] == 0)
                continue;
            for (int di = -1; di <= 1 && a < 0; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (!f.in_bounds(i + di, j + dj)) continue;
                    const int nx = (i + di) * 16 + j + dj;
                    if (!f.mines[static_cast<std::size_t>(nx)]) {
                        a = idx;
                        b = nx;
                        break;
                    }
                }
        }
    REQUIRE(a >= 0);
    env.step(a); // reveals exactly the numbered cell
    const StepResult r = env.step(b);
    CHECK(r.reward == 1.0); // +1 progress, no once-penalty next to a revealed cell
}

TEST_CASE("stepping on a mine loses the full board value") {
    MinesweeperEnv env;
    env.reset(5);
    const int mine = first_mine(env.field());
    REQUIRE(mine >= 0);
    const StepResult r = env.step(mine);
    CHECK(r.reward == -256.0);
    CHECK(r.terminal == Terminal::Loss);
    CHECK_THROWS(env.step(0));
}

TEST_CASE("clearing the last safe cell wins +N*M, replacing the step reward") {
    MinesweeperConfig cfg;
    cfg.n = 2;
    cfg.m = 2;
    cfg.density = 0.25; // exactly one mine
    MinesweeperEnv env(cfg);
    env.reset(9);
    REQUIRE(env.field().mine_count() == 1);
    double last = 0.0;
    for (int c = 0; c < 4; ++c) {
        if (env.field().mines[static_cast<std::size_t>(c)]) continue;
        last = env.step(c).reward;
    }
    CHECK(env.terminal() == Terminal::Win);
    CHECK(last == 4.0);
}

TEST_CASE("zero-count reveal floods exactly the oracle set") {
    Rng rng(21);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        MineField base = MineField::random(9, 9, 0.12, rng);
        for (int cell = 0; cell < base.cells(); ++cell) {
            if (base.mines[static_cast<std::size_t>(cell)]) continue;
            MineField f = base;
            const auto got = f.reveal(cell / f.m, cell % f.m);
            const auto want = oracles::minesweeper_reveal_oracle(base, cell);
            CHECK(!want.mine);
            CHECK(std::set<int>(got.begin(), got.end()) == want.revealed);
            for (int i = 0; i < f.cells(); ++i)
                CHECK(f.revealed[static_cast<std::size_t>(i)] == (want.revealed.count(i) > 0));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("state key marks unknown cells with '#' and revealed with counts") {
    MinesweeperEnv env;
    env.reset(2);
    std::string key = env.state_key();
    CHECK(key == std::string(256, '#'));
    const int cell = fresh_safe_cell(env.field());
    env.step(cell);
    key = env.state_key();
    CHECK(key[static_cast<std::size_t>(cell)] ==
          static_cast<char>('0' + env.field().counts[static_cast<std::size_t>(cell)]));
    CHECK(key.find('#') != std::string::npos);
}

TEST_CASE("the three encodings agree on the same compact state") {
    MinesweeperEnv env;
    env.reset(8);
    for (int k = 0; k < 6; ++k) {
        const int cell = fresh_safe_cell(env.field());
        if (cell < 0) break;
        env.step(cell);
    }
    const auto codes = env.compact_state();
    const Tensor onehot = encode_minesweeper(codes, 16, 16, Encoding::OneHot);
    const Tensor cond = encode_minesweeper(codes, 16, 16, Encoding::Condensed);
    const Tensor image = encode_minesweeper(codes, 16, 16, Encoding::Image);
    CHECK(onehot.shape == std::vector<int>{16, 16, 10});
    CHECK(cond.shape == std::vector<int>{16, 16, 2});
    CHECK(image.shape == std::vector<int>{16, 16, 1});
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            const int code = codes[static_cast<std::size_t>(i * 16 + j)];
            double hot_sum = 0.0;
            for (int c = 0; c < 10; ++c) hot_sum += onehot.at(i, j, c);
            CHECK(hot_sum == 1.0); // exactly one channel set
            if (code == 9) {
                CHECK(onehot.at(i, j, 9) == 1.0);
                CHECK(cond.at(i, j, 1) == 1.0);
                CHECK(cond.at(i, j, 0) == 0.0);
            } else {
                CHECK(onehot.at(i, j, code == 0 ? 8 : code - 1) == 1.0);
                CHECK(cond.at(i, j, 0) == static_cast<double>(code));
                CHECK(cond.at(i, j, 1) == 0.0);
            }
            CHECK(image.at(i, j, 0) == static_cast<double>(code));
        }
}

TEST_CASE("identical seeds give identical fields and rewards") {
    MinesweeperEnv a, b;
    a.reset(77);
    b.reset(77);
    CHECK(a.field().mines == b.field().mines);
    Rng picks(1);
    for (int k = 0; k < 30 && a.terminal() == Terminal::Ongoing; ++k) {
        const int cell = static_cast<int>(picks.below(256));
        const StepResult ra = a.step(cell);
        const StepResult rb = b.step(cell);
        CHECK(ra.reward == rb.reward);
        CHECK(a.state_key() == b.state_key());
        if (ra.terminal != Terminal::Ongoing) break;
    }
}

} // TEST_SUITE
