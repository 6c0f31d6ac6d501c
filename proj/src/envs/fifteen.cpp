#include "qrl/fifteen.hpp"

#include <cstdlib>
#include <sstream>

namespace qrl {

SlidingBoard SlidingBoard::solved(int n) {
    SlidingBoard b;
    b.n = n;
    b.cells.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n * n - 1; ++i) b.cells[static_cast<std::size_t>(i)] = i + 1;
    b.cells.back() = 0;
    return b;
}

SlidingBoard SlidingBoard::from_key(const std::string& key) {
    SlidingBoard b;
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ',')) b.cells.push_back(std::stoi(tok));
    int n = 2;
    while (n * n < static_cast<int>(b.cells.size())) ++n;
    if (n * n != static_cast<int>(b.cells.size()))
        throw std::invalid_argument("board key is not a square grid: " + key);
    b.n = n;
    std::vector<bool> seen(b.cells.size(), false);
    for (int v : b.cells) {
        if (v < 0 || v >= n * n || seen[static_cast<std::size_t>(v)])
            throw std::invalid_argument("board key is not a permutation: " + key);
        seen[static_cast<std::size_t>(v)] = true;
    }
    return b;
}

bool SlidingBoard::is_solved() const {
    for (int i = 0; i < n * n - 1; ++i)
        if (cells[static_cast<std::size_t>(i)] != i + 1) return false;
    return true;
}

int SlidingBoard::blank_pos() const { return tile_pos(0); }

int SlidingBoard::tile_pos(int tile) const {
    for (int i = 0; i < n * n; ++i)
        if (cells[static_cast<std::size_t>(i)] == tile) return i;
    throw std::logic_error("tile not on board");
}

bool SlidingBoard::apply(Slide a) {
    const int b = blank_pos();
    const int r = b / n, c = b % n;
    int r2 = r, c2 = c;
    switch (a) {
        case Slide::Up: --r2; break;
        case Slide::Right: ++c2; break;
        case Slide::Down: ++r2; break;
        case Slide::Left: --c2; break;
    }
    if (r2 < 0 || r2 >= n || c2 < 0 || c2 >= n) return false;
    std::swap(cells[static_cast<std::size_t>(b)], cells[static_cast<std::size_t>(r2 * n + c2)]);
    return true;
}

int SlidingBoard::manhattan_sum() const {
    int sum = 0;
    for (int i = 0; i < n * n; ++i) {
        const int t = cells[static_cast<std::size_t>(i)];
        if (t == 0) continue;
        const int home = t - 1;
        sum += std::abs(i / n - home / n) + std::abs(i % n - home % n);
    }
    return sum;
}

int SlidingBoard::correct_tiles() const {
    int k = 0;
    for (int i = 0; i < n * n - 1; ++i)
        if (cells[static_cast<std::size_t>(i)] == i + 1) ++k;
    return k;
}

bool SlidingBoard::solvable() const {
    // Every slide is a transposition (flips permutation parity) and moves
    // the blank one step; solvable iff the permutation parity relative to
    // the goal equals the parity of the blank's taxi distance from home.
    int inversions = 0;
    std::vector<int> perm = cells;
    for (auto& v : perm)
        if (v == 0) v = n * n; // blank sorts last in the goal order
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inversions;
    const int b = blank_pos();
    const int blank_dist = std::abs(b / n - (n - 1)) + std::abs(b % n - (n - 1));
    return (inversions % 2) == (blank_dist % 2);
}

std::string SlidingBoard::key() const {
    std::string s;
    for (int i = 0; i < n * n; ++i) {
        if (i) s += ',';
        s += std::to_string(cells[static_cast<std::size_t>(i)]);
    }
    return s;
}

FifteenEnv::FifteenEnv(FifteenConfig cfg) : cfg_(cfg) {
    if (cfg_.n < 2 || cfg_.n > 4) throw std::invalid_argument("board size must be 2..4");
    budget_ = cfg_.move_budget > 0 ? cfg_.move_budget : (cfg_.n * cfg_.n) * (cfg_.n * cfg_.n);
    board_ = SlidingBoard::solved(cfg_.n);
}

SlidingBoard FifteenEnv::shuffled_board(int n, DifficultyClass::Level level, Rng& rng) {
    int lo = 1, hi = 9;
    if (level == DifficultyClass::Level::Medium) {
        lo = 10;
        hi = 29;
    } else if (level == DifficultyClass::Level::Hard) {
        lo = 30;
        hi = 40;
    }
    if (n == 2) {
        lo = 1;
        hi = 6; // diameter of the 2x2 puzzle graph
    }
    const int target = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    SlidingBoard b = SlidingBoard::solved(n);
    // Random legal walk; the distance changes by +-1 per effective move, so
    // it crosses the target exactly on the way up.
    for (long guard = 0; guard < 2000000; ++guard) {
        if (b.manhattan_sum() == target) return b;
        while (!b.apply(static_cast<Slide>(rng.below(4)))) {
        }
    }
    throw std::runtime_error("shuffle walk failed to reach target distance");
}

Tensor FifteenEnv::reset(std::uint64_t seed) {
    Rng rng(seed);
    return reset_to(shuffled_board(cfg_.n, cfg_.level, rng));
}

Tensor FifteenEnv::reset_to(const SlidingBoard& board) {
    if (board.n != cfg_.n) throw std::invalid_argument("board size mismatch");
    board_ = board;
    terminal_ = board_.is_solved() ? Terminal::Win : Terminal::Ongoing;
    moves_ = 0;
    return observation();
}

StepResult FifteenEnv::step(int action) {
    require_ongoing();
    if (action < 0 || action >= 4) throw std::out_of_range("fifteen action out of range");

    const int before_correct = board_.correct_tiles();
    board_.apply(static_cast<Slide>(action));
    ++moves_;

    StepResult res;
    if (cfg_.rewards == FifteenRewards::Original) {
        if (board_.is_solved()) {
            res.reward = 15.0;
            terminal_ = Terminal::Win;
        } else if (moves_ >= budget_) {
            res.reward = -15.0;
            terminal_ = Terminal::Loss;
        } else {
            res.reward = board_.correct_tiles() > before_correct ? 1.0 : -1.0;
        }
    } else {
        if (board_.is_solved()) {
            res.reward = 1.0;
            terminal_ = Terminal::Win;
        } else if (moves_ >= budget_) {
            res.reward = 0.0;
            terminal_ = Terminal::Loss;
        }
    }
    res.terminal = terminal_;
    res.observation = observation();
    res.info["steps"] = moves_;
    res.info["correct_tiles"] = board_.correct_tiles();
    return res;
}

std::vector<std::uint8_t> FifteenEnv::compact_state() const {
    return std::vector<std::uint8_t>(board_.cells.begin(), board_.cells.end());
}

Tensor FifteenEnv::decode_observation(const std::vector<std::uint8_t>& compact) const {
    Tensor t = Tensor::zeros({cfg_.n, cfg_.n, 1});
    for (int i = 0; i < cfg_.n * cfg_.n; ++i) t.at(i) = compact[static_cast<std::size_t>(i)];
    return t;
}

} // namespace qrl
