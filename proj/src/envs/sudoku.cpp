#include "qrl/sudoku.hpp"

#include <bit>
#include <fstream>

namespace qrl {

namespace {

constexpr int box_of(int row, int col) { return (row / 3) * 3 + col / 3; }

struct Masks {
    std::array<int, 9> row{}, col{}, box{};

    static Masks of(const std::array<int, 81>& cells) {
        Masks m;
        for (int i = 0; i < 81; ++i) {
            const int v = cells[static_cast<std::size_t>(i)];
            if (v == 0) continue;
            const int bit = 1 << v;
            m.row[static_cast<std::size_t>(i / 9)] |= bit;
            m.col[static_cast<std::size_t>(i % 9)] |= bit;
            m.box[static_cast<std::size_t>(box_of(i / 9, i % 9))] |= bit;
        }
        return m;
    }

    int candidates(int i) const {
        const int used = row[static_cast<std::size_t>(i / 9)] | col[static_cast<std::size_t>(i % 9)] |
                         box[static_cast<std::size_t>(box_of(i / 9, i % 9))];
        return ~used & 0x3FE; // bits 1..9
    }

    void place(int i, int v) {
        const int bit = 1 << v;
        row[static_cast<std::size_t>(i / 9)] |= bit;
        col[static_cast<std::size_t>(i % 9)] |= bit;
        box[static_cast<std::size_t>(box_of(i / 9, i % 9))] |= bit;
    }

    void remove(int i, int v) {
        const int bit = ~(1 << v);
        row[static_cast<std::size_t>(i / 9)] &= bit;
        col[static_cast<std::size_t>(i % 9)] &= bit;
        box[static_cast<std::size_t>(box_of(i / 9, i % 9))] &= bit;
    }
};

// Assign all naked singles; returns false on contradiction.
bool propagate_naked_singles(std::array<int, 81>& cells, Masks& m) {
    bool again = true;
    while (again) {
        again = false;
        for (int i = 0; i < 81; ++i) {
            if (cells[static_cast<std::size_t>(i)] != 0) continue;
            const int cand = m.candidates(i);
            if (cand == 0) return false;
            if (std::popcount(static_cast<unsigned>(cand)) == 1) {
                const int v = std::countr_zero(static_cast<unsigned>(cand));
                cells[static_cast<std::size_t>(i)] = v;
                m.place(i, v);
                again = true;
            }
        }
    }
    return true;
}

struct GuessSolver {
    bool solve(std::array<int, 81>& cells, Masks& m, int& guesses) {
        std::array<int, 81> saved_cells = cells;
        Masks saved_m = m;
        if (!propagate_naked_singles(cells, m)) {
            cells = saved_cells;
            m = saved_m;
            return false;
        }
        int best = -1, best_count = 10;
        for (int i = 0; i < 81; ++i) {
            if (cells[static_cast<std::size_t>(i)] != 0) continue;
            const int c = std::popcount(static_cast<unsigned>(m.candidates(i)));
            if (c < best_count) {
                best_count = c;
                best = i;
            }
        }
        if (best == -1) return true; // complete
        const int cand = m.candidates(best);
        for (int v = 1; v <= 9; ++v) {
            if (!(cand & (1 << v))) continue;
            cells[static_cast<std::size_t>(best)] = v;
            m.place(best, v);
            int sub = 0;
            if (solve(cells, m, sub)) {
                guesses = 1 + sub;
                return true;
            }
            m.remove(best, v);
            cells[static_cast<std::size_t>(best)] = 0;
        }
        cells = saved_cells;
        m = saved_m;
        return false;
    }
};

// Counts solutions up to `limit` with plain backtracking.
int count_solutions(std::array<int, 81>& cells, Masks& m, int limit) {
    int best = -1, best_count = 10;
    for (int i = 0; i < 81; ++i) {
        if (cells[static_cast<std::size_t>(i)] != 0) continue;
        const int c = std::popcount(static_cast<unsigned>(m.candidates(i)));
        if (c == 0) return 0;
        if (c < best_count) {
            best_count = c;
            best = i;
        }
    }
    if (best == -1) return 1;
    int total = 0;
    const int cand = m.candidates(best);
    for (int v = 1; v <= 9 && total < limit; ++v) {
        if (!(cand & (1 << v))) continue;
        cells[static_cast<std::size_t>(best)] = v;
        m.place(best, v);
        total += count_solutions(cells, m, limit - total);
        m.remove(best, v);
        cells[static_cast<std::size_t>(best)] = 0;
    }
    return total;
}

bool fill_full_grid(std::array<int, 81>& cells, Masks& m, int pos, Rng& rng) {
    if (pos == 81) return true;
    if (cells[static_cast<std::size_t>(pos)] != 0) return fill_full_grid(cells, m, pos + 1, rng);
    const int cand = m.candidates(pos);
    std::array<int, 9> order;
    int k = 0;
    for (int v = 1; v <= 9; ++v)
        if (cand & (1 << v)) order[static_cast<std::size_t>(k++)] = v;
    for (int i = k - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    for (int i = 0; i < k; ++i) {
        const int v = order[static_cast<std::size_t>(i)];
        cells[static_cast<std::size_t>(pos)] = v;
        m.place(pos, v);
        if (fill_full_grid(cells, m, pos + 1, rng)) return true;
        m.remove(pos, v);
        cells[static_cast<std::size_t>(pos)] = 0;
    }
    return false;
}

} // namespace

SudokuGrid SudokuGrid::from_line(const std::string& line81) {
    std::string body = line81;
    if (auto comma = body.find(','); comma != std::string::npos) body = body.substr(0, comma);
    if (body.size() != 81) throw std::invalid_argument("sudoku line must have 81 characters");
    SudokuGrid g;
    for (int i = 0; i < 81; ++i) {
        const char ch = body[static_cast<std::size_t>(i)];
        if (ch == '0' || ch == '.') {
            g.cells[static_cast<std::size_t>(i)] = 0;
        } else if (ch >= '1' && ch <= '9') {
            g.cells[static_cast<std::size_t>(i)] = ch - '0';
            g.givens[static_cast<std::size_t>(i)] = true;
        } else {
            throw std::invalid_argument("bad sudoku character: " + std::string(1, ch));
        }
    }
    if (!g.fully_consistent()) throw std::invalid_argument("sudoku line violates constraints");
    return g;
}

std::string SudokuGrid::to_line() const {
    std::string s(81, '0');
    for (int i = 0; i < 81; ++i) s[static_cast<std::size_t>(i)] = static_cast<char>('0' + cells[static_cast<std::size_t>(i)]);
    return s;
}

int SudokuGrid::filled_count() const {
    int k = 0;
    for (int v : cells) k += v != 0;
    return k;
}

bool SudokuGrid::consistent_placement(int row, int col, int v) const {
    const Masks m = Masks::of(cells);
    return (m.candidates(row * 9 + col) & (1 << v)) != 0;
}

bool SudokuGrid::fully_consistent() const {
    std::array<int, 9> row{}, col{}, box{};
    for (int i = 0; i < 81; ++i) {
        const int v = cells[static_cast<std::size_t>(i)];
        if (v == 0) continue;
        const int bit = 1 << v;
        const int r = i / 9, c = i % 9, b = box_of(r, c);
        if ((row[static_cast<std::size_t>(r)] | col[static_cast<std::size_t>(c)] | box[static_cast<std::size_t>(b)]) & bit)
            return false;
        row[static_cast<std::size_t>(r)] |= bit;
        col[static_cast<std::size_t>(c)] |= bit;
        box[static_cast<std::size_t>(b)] |= bit;
    }
    return true;
}

SudokuAnalysis analyze_sudoku(const SudokuGrid& puzzle) {
    SudokuAnalysis res;
    if (!puzzle.fully_consistent()) return res;

    std::array<int, 81> cells = puzzle.cells;
    Masks m = Masks::of(cells);
    const int solutions = count_solutions(cells, m, 2);
    res.solvable = solutions >= 1;
    res.unique = solutions == 1;
    if (!res.solvable) return res;

    cells = puzzle.cells;
    m = Masks::of(cells);
    GuessSolver solver;
    int guesses = 0;
    solver.solve(cells, m, guesses);
    res.guesses = guesses;
    res.solution.cells = cells;
    res.solution.givens.fill(true);
    return res;
}

SudokuGrid generate_sudoku(Rng& rng, int givens, std::optional<DifficultyClass::Level> level, int max_attempts) {
    if (givens < 17 || givens > 81) throw std::invalid_argument("givens must be in [17, 81]");
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::array<int, 81> full{};
        Masks m{};
        if (!fill_full_grid(full, m, 0, rng)) continue;

        std::array<int, 81> order;
        for (int i = 0; i < 81; ++i) order[static_cast<std::size_t>(i)] = i;
        for (int i = 80; i > 0; --i)
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);

        std::array<int, 81> cells = full;
        int holes = 0;
        const int want_holes = 81 - givens;
        for (int i = 0; i < 81 && holes < want_holes; ++i) {
            const int cell = order[static_cast<std::size_t>(i)];
            const int saved = cells[static_cast<std::size_t>(cell)];
            cells[static_cast<std::size_t>(cell)] = 0;
            Masks mm = Masks::of(cells);
            std::array<int, 81> work = cells;
            if (count_solutions(work, mm, 2) == 1)
                ++holes;
            else
                cells[static_cast<std::size_t>(cell)] = saved;
        }
        if (holes < want_holes) continue;

        SudokuGrid g;
        g.cells = cells;
        for (int i = 0; i < 81; ++i) g.givens[static_cast<std::size_t>(i)] = cells[static_cast<std::size_t>(i)] != 0;
        if (!level) return g;
        const SudokuAnalysis a = analyze_sudoku(g);
        if (a.unique && DifficultyClass::sudoku_level(a.guesses) == *level) return g;
    }
    throw std::runtime_error("sudoku generation failed: no puzzle of requested difficulty found");
}

std::vector<SudokuGrid> load_sudoku_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sudoku puzzle file: " + path);
    std::vector<SudokuGrid> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(SudokuGrid::from_line(line));
    }
    return out;
}

SudokuEnv::SudokuEnv(SudokuConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.puzzles.empty()) throw std::invalid_argument("sudoku env needs a puzzle source");
    for (std::size_t i = 0; i < cfg_.puzzles.size(); ++i) {
        if (cfg_.level) {
            const SudokuAnalysis a = analyze_sudoku(cfg_.puzzles[i]);
            if (!a.unique || DifficultyClass::sudoku_level(a.guesses) != *cfg_.level) continue;
        }
        pool_.push_back(i);
    }
    if (pool_.empty()) throw std::runtime_error("sudoku source exhausted for requested difficulty");
}

Tensor SudokuEnv::reset(std::uint64_t seed) {
    Rng rng(seed);
    grid_ = cfg_.puzzles[pool_[static_cast<std::size_t>(rng.below(pool_.size()))]];
    // Non-given cells start empty even if the source line carried them.
    for (int i = 0; i < 81; ++i)
        if (!grid_.givens[static_cast<std::size_t>(i)]) grid_.cells[static_cast<std::size_t>(i)] = 0;
    terminal_ = Terminal::Ongoing;
    moves_ = 0;
    return observation();
}

StepResult SudokuEnv::step(int action) {
    require_ongoing();
    if (action < 0 || action >= 810) throw std::out_of_range("sudoku action out of range");

    const int row = action / 90;
    const int col = (action / 10) % 9;
    const int v = action % 10;
    ++moves_;

    StepResult res;
    const std::size_t idx = static_cast<std::size_t>(row * 9 + col);
    if (v == 0) {
        res.reward = -1.0; // defined no-op, penalized as no_progress
    } else if (grid_.cells[idx] != 0) {
        res.reward = -1.0;
    } else if (!grid_.consistent_placement(row, col, v)) {
        res.reward = -2.0;
        if (cfg_.write_violations) grid_.cells[idx] = v;
    } else {
        grid_.cells[idx] = v;
        res.reward = 1.0;
    }

    if (grid_.filled_count() == 81 && grid_.fully_consistent()) {
        terminal_ = Terminal::Win;
    } else if (moves_ >= cfg_.move_threshold) {
        res.reward = -20.0;
        terminal_ = Terminal::Loss;
    }
    res.terminal = terminal_;
    res.observation = observation();
    res.info["steps"] = moves_;
    res.info["filled_cells"] = grid_.filled_count();
    return res;
}

std::vector<std::uint8_t> SudokuEnv::compact_state() const {
    return std::vector<std::uint8_t>(grid_.cells.begin(), grid_.cells.end());
}

Tensor SudokuEnv::decode_observation(const std::vector<std::uint8_t>& compact) const {
    Tensor t = Tensor::zeros({9, 9, 10});
    for (int i = 0; i < 81; ++i) t.at(i / 9, i % 9, compact[static_cast<std::size_t>(i)]) = 1.0;
    return t;
}

} // namespace qrl
