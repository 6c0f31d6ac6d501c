#include "qrl/minesweeper.hpp"

#include <cmath>
#include <deque>

namespace qrl {

int MineField::mine_count() const {
    int k = 0;
    for (bool b : mines) k += b;
    return k;
}

int MineField::revealed_count() const {
    int k = 0;
    for (bool b : revealed) k += b;
    return k;
}

MineField MineField::random(int n, int m, double density, Rng& rng) {
    if (density <= 0.0 || density >= 1.0) throw std::invalid_argument("mine density must be in (0,1)");
    MineField f;
    f.n = n;
    f.m = m;
    f.mines.assign(static_cast<std::size_t>(n * m), false);
    f.revealed.assign(static_cast<std::size_t>(n * m), false);
    f.counts.assign(static_cast<std::size_t>(n * m), 0);

    const int k = static_cast<int>(std::lround(density * n * m));
    // Partial Fisher-Yates: first k entries of a shuffled index list.
    std::vector<int> idx(static_cast<std::size_t>(n * m));
    for (int i = 0; i < n * m; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n * m - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        f.mines[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            int c = 0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (f.in_bounds(i + di, j + dj) && f.mines[static_cast<std::size_t>((i + di) * m + j + dj)]) ++c;
                }
            f.counts[static_cast<std::size_t>(i * m + j)] = c;
        }
    return f;
}

std::vector<int> MineField::reveal(int i, int j) {
    std::vector<int> out;
    const int start = i * m + j;
    if (revealed[static_cast<std::size_t>(start)]) return out;
    revealed[static_cast<std::size_t>(start)] = true;
    out.push_back(start);
    if (counts[static_cast<std::size_t>(start)] != 0) return out;

    std::deque<int> queue{start};
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        const int ci = cur / m, cj = cur % m;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                const int ni = ci + di, nj = cj + dj;
                if (!in_bounds(ni, nj)) continue;
                const int nx = ni * m + nj;
                if (revealed[static_cast<std::size_t>(nx)] || mines[static_cast<std::size_t>(nx)]) continue;
                revealed[static_cast<std::size_t>(nx)] = true;
                out.push_back(nx);
                if (counts[static_cast<std::size_t>(nx)] == 0) queue.push_back(nx);
            }
    }
    return out;
}

Tensor encode_minesweeper(const std::vector<std::uint8_t>& codes, int n, int m, Encoding enc) {
    switch (enc) {
        case Encoding::OneHot: {
            // Channels 0..7: revealed counts 1..8; 8: revealed empty; 9: unknown.
            Tensor t = Tensor::zeros({n, m, 10});
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) {
                    const int code = codes[static_cast<std::size_t>(i * m + j)];
                    if (code == 9)
                        t.at(i, j, 9) = 1.0;
                    else if (code == 0)
                        t.at(i, j, 8) = 1.0;
                    else
                        t.at(i, j, code - 1) = 1.0;
                }
            return t;
        }
        case Encoding::Condensed: {
            // Channel 0: revealed count as integer; channel 1: unknown flag.
            Tensor t = Tensor::zeros({n, m, 2});
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) {
                    const int code = codes[static_cast<std::size_t>(i * m + j)];
                    if (code == 9)
                        t.at(i, j, 1) = 1.0;
                    else
                        t.at(i, j, 0) = code;
                }
            return t;
        }
        case Encoding::Image: {
            // One channel, 'color' 0..9: revealed count or 9 for unknown.
            Tensor t = Tensor::zeros({n, m, 1});
            for (int i = 0; i < n * m; ++i) t.at(i) = codes[static_cast<std::size_t>(i)];
            return t;
        }
    }
    throw std::invalid_argument("unsupported minesweeper encoding");
}

MinesweeperEnv::MinesweeperEnv(MinesweeperConfig cfg) : cfg_(cfg) {
    if (cfg_.n <= 0 || cfg_.m <= 0) throw std::invalid_argument("bad minefield dims");
    if (cfg_.density <= 0.0 || cfg_.density >= 1.0) throw std::invalid_argument("mine density must be in (0,1)");
    field_ = MineField{};
    field_.n = cfg_.n;
    field_.m = cfg_.m;
    field_.mines.assign(static_cast<std::size_t>(cfg_.n * cfg_.m), false);
    field_.revealed.assign(static_cast<std::size_t>(cfg_.n * cfg_.m), false);
    field_.counts.assign(static_cast<std::size_t>(cfg_.n * cfg_.m), 0);
}

std::array<int, 3> MinesweeperEnv::observation_shape() const {
    switch (cfg_.encoding) {
        case Encoding::OneHot: return {cfg_.n, cfg_.m, 10};
        case Encoding::Condensed: return {cfg_.n, cfg_.m, 2};
        case Encoding::Image: return {cfg_.n, cfg_.m, 1};
    }
    throw std::invalid_argument("unsupported minesweeper encoding");
}

Tensor MinesweeperEnv::reset(std::uint64_t seed) {
    Rng rng(seed);
    field_ = MineField::random(cfg_.n, cfg_.m, cfg_.density, rng);
    terminal_ = Terminal::Ongoing;
    steps_ = 0;
    return observation();
}

StepResult MinesweeperEnv::step(int action) {
    require_ongoing();
    if (action < 0 || action >= action_count()) throw std::out_of_range("minesweeper action out of range");

    const int i = action / cfg_.m, j = action % cfg_.m;
    const double full = cfg_.n * cfg_.m;
    ++steps_;

    StepResult res;
    if (field_.mines[static_cast<std::size_t>(action)]) {
        res.reward = -full;
        terminal_ = Terminal::Loss;
    } else if (field_.revealed[static_cast<std::size_t>(action)]) {
        res.reward = -0.5; // no_progress
    } else {
        // 'once' penalty applies when the pick had no revealed neighbors.
        int revealed_neighbors = 0;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                if (field_.in_bounds(i + di, j + dj) &&
                    field_.revealed[static_cast<std::size_t>((i + di) * cfg_.m + j + dj)])
                    ++revealed_neighbors;
            }
        field_.reveal(i, j);
        if (field_.revealed_count() == field_.cells() - field_.mine_count()) {
            res.reward = full;
            terminal_ = Terminal::Win;
        } else {
            res.reward = 1.0 + (revealed_neighbors == 0 ? -0.5 : 0.0);
        }
    }
    res.terminal = terminal_;
    res.observation = observation();
    res.info["steps"] = steps_;
    res.info["revealed_fraction"] = field_.revealed_count() / full;
    return res;
}

std::string MinesweeperEnv::state_key() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(field_.cells()));
    for (int i = 0; i < field_.cells(); ++i) {
        if (field_.revealed[static_cast<std::size_t>(i)])
            s += static_cast<char>('0' + field_.counts[static_cast<std::size_t>(i)]);
        else
            s += '#';
    }
    return s;
}

std::vector<std::uint8_t> MinesweeperEnv::compact_state() const {
    std::vector<std::uint8_t> codes(static_cast<std::size_t>(field_.cells()), 9);
    for (int i = 0; i < field_.cells(); ++i)
        if (field_.revealed[static_cast<std::size_t>(i)])
            codes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(field_.counts[static_cast<std::size_t>(i)]);
    return codes;
}

Tensor MinesweeperEnv::decode_observation(const std::vector<std::uint8_t>& compact) const {
    return encode_minesweeper(compact, cfg_.n, cfg_.m, cfg_.encoding);
}

} // namespace qrl
