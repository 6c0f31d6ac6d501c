#include "qrl/game2048.hpp"

namespace qrl {

std::array<int, 4> merge_row_left(const std::array<int, 4>& row) {
    int packed[4];
    int k = 0;
    for (int v : row)
        if (v != 0) packed[k++] = v;

    std::array<int, 4> out{};
    int o = 0;
    for (int i = 0; i < k; ++i) {
        if (i + 1 < k && packed[i] == packed[i + 1] && packed[i] < 15) {
            out[static_cast<std::size_t>(o++)] = packed[i] + 1;
            ++i; // both source tiles consumed; result cannot merge again
        } else {
            out[static_cast<std::size_t>(o++)] = packed[i];
        }
    }
    return out;
}

namespace {

// Cell index of the k-th element of a line when sliding in `dir`.
// k = 0 is the leading edge of the move.
int line_cell(int dir, int line, int k) {
    switch (dir) {
        case 0: return k * 4 + line;        // up: column, top first
        case 1: return line * 4 + (3 - k);  // right: row, right first
        case 2: return (3 - k) * 4 + line;  // down: column, bottom first
        case 3: return line * 4 + k;        // left: row, left first
    }
    throw std::out_of_range("2048 action out of range");
}

} // namespace

int Grid2048::max_exponent() const {
    int m = 0;
    for (int v : exp) m = std::max(m, v);
    return m;
}

int Grid2048::empty_count() const {
    int k = 0;
    for (int v : exp) k += v == 0;
    return k;
}

bool Grid2048::slide(int dir) {
    bool changed = false;
    for (int line = 0; line < 4; ++line) {
        std::array<int, 4> row{};
        for (int k = 0; k < 4; ++k) row[static_cast<std::size_t>(k)] = exp[static_cast<std::size_t>(line_cell(dir, line, k))];
        const std::array<int, 4> merged = merge_row_left(row);
        for (int k = 0; k < 4; ++k) {
            int& cell = exp[static_cast<std::size_t>(line_cell(dir, line, k))];
            if (cell != merged[static_cast<std::size_t>(k)]) {
                cell = merged[static_cast<std::size_t>(k)];
                changed = true;
            }
        }
    }
    return changed;
}

bool Grid2048::any_move_changes() const {
    for (int dir = 0; dir < 4; ++dir) {
        Grid2048 copy = *this;
        if (copy.slide(dir)) return true;
    }
    return false;
}

void Grid2048::spawn_two(Rng& rng) {
    const int empties = empty_count();
    if (empties == 0) throw std::logic_error("spawn on a full grid");
    int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(empties)));
    for (auto& v : exp)
        if (v == 0 && pick-- == 0) {
            v = 1;
            return;
        }
}

double shaped_reward_2048(const Grid2048& g, Features2048 f) {
    const bool raw = f == Features2048::Raw;
    const int maxe = g.max_exponent();
    const double x0 = maxe == 0 ? 0.0 : (raw ? static_cast<double>(1 << maxe) : maxe);
    const double x1 = g.empty_count();
    double x2 = 0.0, x3 = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const int v = g.at(r, c);
            if (v == 0) continue;
            if (c + 1 < 4 && g.at(r, c + 1) == v) {
                x2 += 1.0;
                x3 += raw ? static_cast<double>(1 << v) : v;
            }
            if (r + 1 < 4 && g.at(r + 1, c) == v) {
                x2 += 1.0;
                x3 += raw ? static_cast<double>(1 << v) : v;
            }
        }
    return 4.0 * x0 + 3.0 * x1 + 1.0 * x2 + 1.0 * x3;
}

G2048Env::G2048Env(G2048Config cfg) : cfg_(cfg) {}

Tensor G2048Env::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    grid_ = Grid2048{};
    grid_.spawn_two(rng_);
    grid_.spawn_two(rng_);
    terminal_ = Terminal::Ongoing;
    reached_1024_ = false;
    steps_ = 0;
    return observation();
}

StepResult G2048Env::step(int action) {
    require_ongoing();
    if (action < 0 || action >= 4) throw std::out_of_range("2048 action out of range");

    const bool changed = grid_.slide(action);
    if (changed) grid_.spawn_two(rng_);
    ++steps_;
    if (grid_.max_exponent() >= 10) reached_1024_ = true;

    StepResult res;
    res.reward = shaped_reward_2048(grid_, cfg_.features);
    if (!grid_.any_move_changes()) {
        terminal_ = reached_1024_ ? Terminal::Win : Terminal::Loss;
        if (!reached_1024_) res.reward -= cfg_.loss_penalty;
    }
    res.terminal = terminal_;
    res.observation = observation();
    res.info["steps"] = steps_;
    res.info["max_tile"] = grid_.max_exponent() == 0 ? 0.0 : static_cast<double>(1 << grid_.max_exponent());
    res.info["reached_1024"] = reached_1024_ ? 1.0 : 0.0;
    return res;
}

std::string G2048Env::state_key() const {
    std::string s;
    for (int i = 0; i < 16; ++i) {
        if (i) s += ',';
        s += std::to_string(grid_.exp[static_cast<std::size_t>(i)]);
    }
    return s;
}

std::vector<std::uint8_t> G2048Env::compact_state() const {
    return std::vector<std::uint8_t>(grid_.exp.begin(), grid_.exp.end());
}

Tensor G2048Env::decode_observation(const std::vector<std::uint8_t>& compact) const {
    // 4x4x16 one-hot over exponents; channel 0 marks an empty cell.
    Tensor t = Tensor::zeros({4, 4, 16});
    for (int i = 0; i < 16; ++i) t.at(i / 4, i % 4, compact[static_cast<std::size_t>(i)]) = 1.0;
    return t;
}

} // namespace qrl
