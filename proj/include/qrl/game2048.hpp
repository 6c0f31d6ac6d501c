#pragma once

#include <array>
#include <vector>

#include "qrl/env.hpp"
#include "qrl/rng.hpp"

namespace qrl {

// 4x4 grid of tile exponents: 0 = empty, k > 0 = tile 2^k. Exponents are
// capped at 15 to match the 16-channel one-hot encoding.
struct Grid2048 {
    std::array<int, 16> exp{};

    int& at(int r, int c) { return exp[static_cast<std::size_t>(r * 4 + c)]; }
    int at(int r, int c) const { return exp[static_cast<std::size_t>(r * 4 + c)]; }

    int max_exponent() const;
    int empty_count() const;
    bool any_move_changes() const;

    // Slides/merges in the given direction; returns whether the grid changed.
    // (0=up, 1=right, 2=down, 3=left, matching Slide.)
    bool slide(int dir);

    void spawn_two(Rng& rng); // value-2 tile in a uniformly random vacant cell
};

// Canonical single-row merge toward index 0. Each resulting tile merges at
// most once, scanning from the leading edge. Exponents capped at 15.
std::array<int, 4> merge_row_left(const std::array<int, 4>& row);

enum class Features2048 { Log, Raw };

// Shaped reward R = w0*x0 + w1*x1 + w2*x2 + w3*x3 over grid features.
// Log features: x0 = log2(max tile), x1 = empty cells, x2 = adjacent equal
// non-empty pairs, x3 = sum of log2 values over those pairs. Raw features
// replace the log values with raw tile values.
double shaped_reward_2048(const Grid2048& g, Features2048 f = Features2048::Log);

struct G2048Config {
    Features2048 features = Features2048::Log;
    double loss_penalty = 10.0; // subtracted at game over before reaching 1024
};

class G2048Env : public Env {
public:
    explicit G2048Env(G2048Config cfg = {});

    GameId game() const override { return GameId::G2048; }
    int action_count() const override { return 4; }
    std::array<int, 3> observation_shape() const override { return {4, 4, 16}; }

    Tensor reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    Terminal terminal() const override { return terminal_; }
    std::string state_key() const override;

    std::vector<std::uint8_t> compact_state() const override;
    Tensor decode_observation(const std::vector<std::uint8_t>& compact) const override;

    const Grid2048& grid() const { return grid_; }
    bool reached_1024() const { return reached_1024_; }

private:
    G2048Config cfg_;
    Grid2048 grid_;
    Rng rng_;
    Terminal terminal_ = Terminal::Ongoing;
    bool reached_1024_ = false;
    int steps_ = 0;
};

} // namespace qrl
