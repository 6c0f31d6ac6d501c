#pragma once

#include <vector>

#include "qrl/env.hpp"
#include "qrl/rng.hpp"

namespace qrl {

// Minefield state. Cells are addressed row-major: index = M*i + j.
struct MineField {
    int n = 16, m = 16;
    std::vector<bool> mines;
    std::vector<bool> revealed;
    std::vector<int> counts; // neighboring mine counts, 0..8

    int cells() const { return n * m; }
    int mine_count() const;
    int revealed_count() const;
    bool in_bounds(int i, int j) const { return i >= 0 && i < n && j >= 0 && j < m; }

    static MineField random(int n, int m, double density, Rng& rng);

    // Reveals (i, j) and, when its count is zero, the connected zero
    // region plus fringe. Returns the newly revealed cell indices.
    std::vector<int> reveal(int i, int j);
};

struct MinesweeperConfig {
    int n = 16, m = 16;
    double density = 0.15; // defaults per class: low .15, medium .45, high .75
    Encoding encoding = Encoding::Condensed;

    static double default_density(DifficultyClass::Level level) {
        switch (level) {
            case DifficultyClass::Level::Easy: return 0.15;
            case DifficultyClass::Level::Medium: return 0.45;
            case DifficultyClass::Level::Hard: return 0.75;
        }
        return 0.15;
    }
};

class MinesweeperEnv : public Env {
public:
    explicit MinesweeperEnv(MinesweeperConfig cfg = {});

    GameId game() const override { return GameId::Minesweeper; }
    int action_count() const override { return cfg_.n * cfg_.m; }
    std::array<int, 3> observation_shape() const override;

    Tensor reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    Terminal terminal() const override { return terminal_; }
    std::string state_key() const override;

    std::vector<std::uint8_t> compact_state() const override;
    Tensor decode_observation(const std::vector<std::uint8_t>& compact) const override;

    const MineField& field() const { return field_; }

private:
    MinesweeperConfig cfg_;
    MineField field_;
    Terminal terminal_ = Terminal::Ongoing;
    int steps_ = 0;
};

// Observation from a compact cell code vector (0..8 = revealed count,
// 9 = unknown). Shared by the env and the replay path.
Tensor encode_minesweeper(const std::vector<std::uint8_t>& codes, int n, int m, Encoding enc);

} // namespace qrl
