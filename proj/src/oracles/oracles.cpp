#include "qrl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace qrl::oracles {

void TinyMDP::validate() const {
    if (states <= 0 || actions <= 0) throw std::invalid_argument("TinyMDP must have states and actions");
    if (static_cast<int>(arcs.size()) != states * actions)
        throw std::invalid_argument("TinyMDP transition table is not total over (s, a)");
    if (static_cast<int>(terminal.size()) != states)
        throw std::invalid_argument("TinyMDP terminal flags must cover all states");
    for (const Arc& a : arcs)
        if (a.next < 0 || a.next >= states) throw std::invalid_argument("TinyMDP arc out of range");
}

ValueIterationResult value_iteration(const TinyMDP& mdp, double tolerance) {
    mdp.validate();
    if (mdp.discount >= 1.0) throw std::invalid_argument("value iteration requires discount < 1");

    std::vector<double> v(static_cast<std::size_t>(mdp.states), 0.0);
    double residual = tolerance + 1.0;
    while (residual > tolerance) {
        residual = 0.0;
        for (int s = 0; s < mdp.states; ++s) {
            if (mdp.terminal[static_cast<std::size_t>(s)]) continue;
            double best = -HUGE_VAL;
            for (int a = 0; a < mdp.actions; ++a) {
                const auto& arc = mdp.arc(s, a);
                best = std::max(best, arc.reward + mdp.discount * v[static_cast<std::size_t>(arc.next)]);
            }
            residual = std::max(residual, std::fabs(best - v[static_cast<std::size_t>(s)]));
            v[static_cast<std::size_t>(s)] = best;
        }
    }

    ValueIterationResult res;
    res.values = v;
    res.policy.assign(static_cast<std::size_t>(mdp.states), 0);
    for (int s = 0; s < mdp.states; ++s) {
        double best = -HUGE_VAL;
        int best_a = 0;
        for (int a = 0; a < mdp.actions; ++a) {
            const auto& arc = mdp.arc(s, a);
            const double q = mdp.terminal[static_cast<std::size_t>(s)]
                                 ? 0.0
                                 : arc.reward + mdp.discount * v[static_cast<std::size_t>(arc.next)];
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        res.policy[static_cast<std::size_t>(s)] = best_a;
    }
    return res;
}

bool sliding_solvable(const SlidingBoard& board) {
    // Classic rule: count inversions over the tiles (blank excluded).
    // Odd width: solvable iff inversions even. Even width: solvable iff
    // inversions + blank row from the bottom (1-based) is odd.
    const int n = board.n;
    std::vector<int> tiles;
    int blank_row = 0;
    for (int i = 0; i < n * n; ++i) {
        const int v = board.cells[static_cast<std::size_t>(i)];
        if (v == 0)
            blank_row = i / n;
        else
            tiles.push_back(v);
    }
    int inv = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i)
        for (std::size_t j = i + 1; j < tiles.size(); ++j)
            if (tiles[i] > tiles[j]) ++inv;
    if (n % 2 == 1) return inv % 2 == 0;
    const int row_from_bottom = n - blank_row;
    return (inv + row_from_bottom) % 2 == 1;
}

std::optional<std::vector<Slide>> bfs_solve_sliding(const SlidingBoard& board, int max_depth) {
    if (!sliding_solvable(board)) return std::nullopt;
    if (board.is_solved()) return std::vector<Slide>{};

    struct NodeInfo {
        std::string parent;
        Slide via = Slide::Up;
        int depth = 0;
    };
    std::unordered_map<std::string, NodeInfo> seen;
    std::deque<SlidingBoard> frontier{board};
    seen[board.key()] = NodeInfo{"", Slide::Up, 0};

    while (!frontier.empty()) {
        SlidingBoard cur = frontier.front();
        frontier.pop_front();
        const NodeInfo info = seen[cur.key()];
        if (info.depth >= max_depth) throw std::runtime_error("bfs_solve_sliding: depth cap exhausted");
        for (int a = 0; a < 4; ++a) {
            SlidingBoard next = cur;
            if (!next.apply(static_cast<Slide>(a))) continue;
            const std::string key = next.key();
            if (seen.count(key)) continue;
            seen[key] = NodeInfo{cur.key(), static_cast<Slide>(a), info.depth + 1};
            if (next.is_solved()) {
                std::vector<Slide> path;
                std::string at = key;
                while (at != board.key()) {
                    const NodeInfo& ni = seen[at];
                    path.push_back(ni.via);
                    at = ni.parent;
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            frontier.push_back(next);
        }
    }
    return std::nullopt;
}

RevealOracleResult minesweeper_reveal_oracle(const MineField& field, int cell) {
    RevealOracleResult res;
    if (field.mines[static_cast<std::size_t>(cell)]) {
        res.mine = true;
        return res;
    }
    const int n = field.n, m = field.m;
    auto count_at = [&](int i, int j) {
        int c = 0;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                const int ni = i + di, nj = j + dj;
                if (ni >= 0 && ni < n && nj >= 0 && nj < m && field.mines[static_cast<std::size_t>(ni * m + nj)]) ++c;
            }
        return c;
    };

    res.revealed.insert(cell);
    if (count_at(cell / m, cell % m) != 0) return res;

    std::deque<int> queue{cell};
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        const int ci = cur / m, cj = cur % m;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                const int ni = ci + di, nj = cj + dj;
                if (ni < 0 || ni >= n || nj < 0 || nj >= m) continue;
                const int nx = ni * m + nj;
                if (field.mines[static_cast<std::size_t>(nx)] || res.revealed.count(nx)) continue;
                res.revealed.insert(nx);
                if (count_at(ni, nj) == 0) queue.push_back(nx);
            }
    }
    return res;
}

namespace {

// Plain-array sudoku helpers, deliberately not sharing code with the
// production solver.
bool cell_allows(const std::array<int, 81>& cells, int idx, int v) {
    const int r = idx / 9, c = idx % 9;
    for (int k = 0; k < 9; ++k) {
        if (cells[static_cast<std::size_t>(r * 9 + k)] == v) return false;
        if (cells[static_cast<std::size_t>(k * 9 + c)] == v) return false;
    }
    const int br = (r / 3) * 3, bc = (c / 3) * 3;
    for (int i = br; i < br + 3; ++i)
        for (int j = bc; j < bc + 3; ++j)
            if (cells[static_cast<std::size_t>(i * 9 + j)] == v) return false;
    return true;
}

// Returns -1 on contradiction, 0 when nothing was assigned, 1 otherwise.
int naked_single_pass(std::array<int, 81>& cells) {
    int assigned = 0;
    for (int i = 0; i < 81; ++i) {
        if (cells[static_cast<std::size_t>(i)] != 0) continue;
        int only = 0, count = 0;
        for (int v = 1; v <= 9; ++v)
            if (cell_allows(cells, i, v)) {
                only = v;
                ++count;
            }
        if (count == 0) return -1;
        if (count == 1) {
            cells[static_cast<std::size_t>(i)] = only;
            ++assigned;
        }
    }
    return assigned > 0 ? 1 : 0;
}

bool backtrack(std::array<int, 81>& cells, int& guesses) {
    const std::array<int, 81> snapshot = cells;
    int status;
    while ((status = naked_single_pass(cells)) == 1) {
    }
    if (status == -1) {
        cells = snapshot;
        return false;
    }
    int target = -1;
    for (int i = 0; i < 81 && target < 0; ++i)
        if (cells[static_cast<std::size_t>(i)] == 0) target = i;
    if (target < 0) return true;

    for (int v = 1; v <= 9; ++v) {
        if (!cell_allows(cells, target, v)) continue;
        cells[static_cast<std::size_t>(target)] = v;
        int sub = 0;
        if (backtrack(cells, sub)) {
            guesses = 1 + sub;
            return true;
        }
        cells[static_cast<std::size_t>(target)] = 0;
    }
    cells = snapshot;
    return false;
}

int count_all(std::array<int, 81>& cells, int limit) {
    int target = -1;
    for (int i = 0; i < 81 && target < 0; ++i)
        if (cells[static_cast<std::size_t>(i)] == 0) target = i;
    if (target < 0) return 1;
    int total = 0;
    for (int v = 1; v <= 9 && total < limit; ++v) {
        if (!cell_allows(cells, target, v)) continue;
        cells[static_cast<std::size_t>(target)] = v;
        total += count_all(cells, limit - total);
        cells[static_cast<std::size_t>(target)] = 0;
    }
    return total;
}

} // namespace

SudokuBacktrackResult sudoku_backtrack(const SudokuGrid& grid) {
    SudokuBacktrackResult res;
    if (!grid.fully_consistent()) return res;
    std::array<int, 81> work = grid.cells;
    if (count_all(work, 2) != 1) return res;

    work = grid.cells;
    int guesses = 0;
    if (!backtrack(work, guesses)) return res;
    res.valid = true;
    res.guesses = guesses;
    res.solution.cells = work;
    res.solution.givens.fill(true);
    return res;
}

std::array<int, 4> merge_row_oracle(std::array<int, 4> row, bool dir_left) {
    if (!dir_left) std::reverse(row.begin(), row.end());
    std::array<bool, 4> merged{};
    bool moved = true;
    while (moved) {
        moved = false;
        for (int i = 1; i < 4; ++i) {
            const std::size_t a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(i);
            if (row[b] == 0) continue;
            if (row[a] == 0) {
                row[a] = row[b];
                merged[a] = merged[b];
                row[b] = 0;
                merged[b] = false;
                moved = true;
            } else if (row[a] == row[b] && !merged[a] && !merged[b] && row[b] < 15) {
                row[a] += 1;
                merged[a] = true;
                row[b] = 0;
                moved = true;
            }
        }
    }
    if (!dir_left) std::reverse(row.begin(), row.end());
    return row;
}

} // namespace qrl::oracles
