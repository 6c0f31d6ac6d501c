#include "qrl/subproblem.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace qrl {

namespace {

int neighbor_cell(int n, int cell, int action) {
    const int r = cell / n, c = cell % n;
    switch (static_cast<Slide>(action)) {
        case Slide::Up: return r > 0 ? cell - n : -1;
        case Slide::Right: return c < n - 1 ? cell + 1 : -1;
        case Slide::Down: return r < n - 1 ? cell + n : -1;
        case Slide::Left: return c > 0 ? cell - 1 : -1;
    }
    return -1;
}

std::string subproblem_key(const SubproblemSpec& spec, const AbstractState& s) {
    std::string k = "G=";
    for (std::size_t i = 0; i < spec.goal_tiles.size(); ++i) {
        if (i) k += ',';
        k += std::to_string(spec.goal_tiles[i]);
    }
    k += '|';
    k += s.key();
    return k;
}

} // namespace

void SubproblemSpec::validate() const {
    if (n < 2 || n > 4) throw std::invalid_argument("subproblem board size must be 2..4");
    if (goal_tiles.empty()) throw std::invalid_argument("G must be nonempty");
    for (int t : goal_tiles)
        if (t < 1 || t >= n * n) throw std::invalid_argument("G tile id out of range");
    for (int t : fixed_tiles) {
        if (t < 1 || t >= n * n) throw std::invalid_argument("R tile id out of range");
        if (std::find(goal_tiles.begin(), goal_tiles.end(), t) != goal_tiles.end())
            throw std::invalid_argument("G and R must be disjoint");
    }
}

std::string AbstractState::key() const {
    std::string k;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i) k += ',';
        k += std::to_string(static_cast<int>(pos[i]));
    }
    return k;
}

AbstractSpace::AbstractSpace(SubproblemSpec spec, const SlidingBoard& reference) : spec_(std::move(spec)) {
    spec_.validate();
    if (reference.n != spec_.n) throw std::invalid_argument("board size mismatch");
    wall_.assign(static_cast<std::size_t>(spec_.n * spec_.n), false);
    for (int t : spec_.fixed_tiles) wall_[static_cast<std::size_t>(reference.tile_pos(t))] = true;
    homes_.reserve(spec_.goal_tiles.size());
    for (int t : spec_.goal_tiles) homes_.push_back(t - 1);
}

AbstractState AbstractSpace::project(const SlidingBoard& board) const {
    AbstractState s;
    s.pos.reserve(spec_.goal_tiles.size() + 1);
    for (int t : spec_.goal_tiles) s.pos.push_back(static_cast<std::uint8_t>(board.tile_pos(t)));
    s.pos.push_back(static_cast<std::uint8_t>(board.blank_pos()));
    return s;
}

bool AbstractSpace::is_goal(const AbstractState& s) const {
    for (std::size_t i = 0; i < homes_.size(); ++i)
        if (s.pos[i] != homes_[i]) return false;
    return true;
}

std::vector<int> AbstractSpace::legal_actions(const AbstractState& s) const {
    std::vector<int> out;
    const int blank = s.pos.back();
    for (int a = 0; a < 4; ++a) {
        const int target = neighbor_cell(spec_.n, blank, a);
        if (target >= 0 && !wall_[static_cast<std::size_t>(target)]) out.push_back(a);
    }
    return out;
}

AbstractState AbstractSpace::apply(const AbstractState& s, int action) const {
    const int blank = s.pos.back();
    const int target = neighbor_cell(spec_.n, blank, action);
    if (target < 0 || wall_[static_cast<std::size_t>(target)])
        throw std::logic_error("illegal abstract action");
    AbstractState next = s;
    for (std::size_t i = 0; i + 1 < next.pos.size(); ++i)
        if (next.pos[i] == target) next.pos[i] = static_cast<std::uint8_t>(blank);
    next.pos.back() = static_cast<std::uint8_t>(target);
    return next;
}

RestrictedValueResult restricted_q_iteration(const AbstractSpace& space, const AbstractState& start,
                                             double gamma, std::size_t state_cap) {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in (0, 1)");

    // Enumerate the reachable abstract component.
    std::vector<AbstractState> states{start};
    std::unordered_map<std::string, std::size_t> index{{start.key(), 0}};
    for (std::size_t head = 0; head < states.size(); ++head) {
        const AbstractState cur = states[head];
        if (space.is_goal(cur)) continue; // terminal
        for (int a : space.legal_actions(cur)) {
            AbstractState next = space.apply(cur, a);
            if (index.emplace(next.key(), states.size()).second) {
                states.push_back(std::move(next));
                if (states.size() > state_cap)
                    throw std::runtime_error("abstract state space exceeds configured cap");
            }
        }
    }

    // Value iteration: V(goal) = 1, V(s) = gamma * max V(next).
    std::vector<double> v(states.size(), 0.0);
    std::vector<std::vector<std::size_t>> succ(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (space.is_goal(states[i])) {
            v[i] = 1.0;
            continue;
        }
        for (int a : space.legal_actions(states[i]))
            succ[i].push_back(index.at(space.apply(states[i], a).key()));
    }
    double residual = 1.0;
    while (residual > 1e-10) {
        residual = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (space.is_goal(states[i])) continue;
            double best = 0.0;
            for (std::size_t j : succ[i]) best = std::max(best, v[j]);
            const double nv = gamma * best;
            residual = std::max(residual, std::abs(nv - v[i]));
            v[i] = nv;
        }
    }

    RestrictedValueResult res;
    res.state_count = states.size();
    for (std::size_t i = 0; i < states.size(); ++i) res.values.emplace(states[i].key(), v[i]);
    res.start_value = v[0];
    return res;
}

int greedy_action(const AbstractSpace& space, const std::unordered_map<std::string, double>& values,
                  const AbstractState& s) {
    int best_a = -1;
    double best_v = 0.0;
    for (int a : space.legal_actions(s)) {
        const auto it = values.find(space.apply(s, a).key());
        const double v = it == values.end() ? 0.0 : it->second;
        if (v > best_v) {
            best_v = v;
            best_a = a;
        }
    }
    return best_a;
}

HierarchicalResult hierarchical_solve(const SlidingBoard& start, double gamma, std::size_t state_cap) {
    if (!start.solvable()) throw std::invalid_argument("board is unsolvable (permutation parity)");

    HierarchicalResult res;
    SlidingBoard board = start;
    const int n = board.n;

    for (int i = 1; i < n * n; ++i) {
        SubproblemSpec spec;
        spec.n = n;
        spec.goal_tiles = {i};
        for (int t = 1; t < i; ++t) spec.fixed_tiles.push_back(t);

        // Expand G with max(R) until the subproblem is solvable from here.
        AbstractSpace space(spec, board);
        AbstractState state = space.project(board);
        if (space.is_goal(state)) continue;
        RestrictedValueResult vi = restricted_q_iteration(space, state, gamma, state_cap);
        while (vi.start_value == 0.0) {
            if (spec.fixed_tiles.empty())
                throw std::runtime_error("hierarchical solve stuck with empty R; board unsolvable?");
            const int moved = spec.fixed_tiles.back();
            spec.fixed_tiles.pop_back();
            spec.goal_tiles.insert(spec.goal_tiles.begin(), moved);
            ++res.expansions;
            space = AbstractSpace(spec, board);
            state = space.project(board);
            vi = restricted_q_iteration(space, state, gamma, state_cap);
        }

        // Follow the greedy policy until all G tiles are home.
        long guard = 0;
        while (!space.is_goal(state)) {
            const int a = greedy_action(space, vi.values, state);
            if (a < 0) throw std::logic_error("greedy policy stalled on a solvable subproblem");
            state = space.apply(state, a);
            board.apply(static_cast<Slide>(a));
            res.moves.push_back(static_cast<Slide>(a));
            if (++guard > static_cast<long>(vi.state_count) + 4)
                throw std::logic_error("greedy policy exceeded abstract diameter");
        }
    }

    res.solved = board.is_solved();
    return res;
}

void MiniEpisodeConfig::validate() const {
    if (n < 2 || n > 4) throw std::invalid_argument("board size must be 2..4");
    if (alpha <= 0.0 || alpha >= 1.0 + 1e-12) throw std::invalid_argument("alpha must be in (0, 1]");
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in (0, 1)");
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
    if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
    if (overall_move_cap <= 0) throw std::invalid_argument("move budget must be positive");
}

MiniEpisodeLearner::MiniEpisodeLearner(MiniEpisodeConfig cfg) : cfg_(cfg), table_(4) { cfg_.validate(); }

MiniEpisodeStats MiniEpisodeLearner::run_episode(SlidingBoard board, Rng& rng, bool learn) {
    MiniEpisodeStats stats;
    const double eps = learn ? cfg_.epsilon : 0.0;
    const int n = cfg_.n;

    auto masked_choice = [&](const std::vector<double>& row, const std::vector<int>& legal) {
        if (eps > 0.0 && rng.bernoulli(eps)) return legal[static_cast<std::size_t>(rng.below(legal.size()))];
        double best = row[static_cast<std::size_t>(legal[0])];
        for (int a : legal) best = std::max(best, row[static_cast<std::size_t>(a)]);
        // Uniform tie-break: on untouched rows a deterministic pick would
        // replay the same failing path on every retry.
        std::array<int, 4> tied{};
        std::size_t count = 0;
        for (int a : legal)
            if (row[static_cast<std::size_t>(a)] == best) tied[count++] = a;
        return count == 1 ? tied[0] : tied[rng.below(count)];
    };
    auto masked_max = [&](const std::vector<double>& row, const std::vector<int>& legal) {
        double best = row[static_cast<std::size_t>(legal[0])];
        for (int a : legal) best = std::max(best, row[static_cast<std::size_t>(a)]);
        return best;
    };

    for (int k = 1; k < n * n; ++k) {
        SubproblemSpec spec;
        spec.n = n;
        spec.goal_tiles = {k};
        for (int t = 1; t < k; ++t) spec.fixed_tiles.push_back(t);
        // k^2 per the published rule, with a floor for the first tiles:
        // a literal 1-move budget for tile 1 makes boards where it sits a
        // few moves from home structurally unwinnable.
        const int budget = std::max(k * k, 2 * n);
        int attempts = 0;
        bool placed = false;

        while (!placed) {
            AbstractSpace space(spec, board);
            AbstractState state = space.project(board);
            if (space.is_goal(state)) {
                placed = true;
                break;
            }

            bool win = false;
            for (int t = 0; t < budget; ++t) {
                const std::vector<int> legal = space.legal_actions(state);
                if (legal.empty()) break; // blank walled in; count as a loss
                const std::string key = subproblem_key(spec, state);
                const int a = masked_choice(table_.row(key), legal);
                const AbstractState next = space.apply(state, a);
                board.apply(static_cast<Slide>(a));
                ++stats.moves;

                win = space.is_goal(next);
                const bool last = t == budget - 1;
                const double r = win ? 1.0 : (last ? -1.0 : 0.0);
                stats.total_reward += r;
                if (learn) {
                    // Budget exhaustion is a time limit, not a property of
                    // the state: the update bootstraps through it so the
                    // same (state, action) pair is not punished for when it
                    // happened to occur. The -1 stays in the reward totals.
                    const double bootstrap =
                        win ? 0.0 : masked_max(table_.row(subproblem_key(spec, next)),
                                               space.legal_actions(next));
                    double& q = table_.row(key)[static_cast<std::size_t>(a)];
                    q += cfg_.alpha * ((win ? 1.0 : 0.0) + cfg_.gamma * bootstrap - q);
                }
                state = next;
                if (win || stats.moves >= cfg_.overall_move_cap) break;
            }
            if (win) {
                placed = true;
            } else if (stats.moves >= cfg_.overall_move_cap) {
                stats.correct_tiles = board.correct_tiles();
                stats.outcome = Outcome::Timeout;
                return stats;
            } else if (++attempts >= cfg_.retries) {
                // Retries exhausted in this G/R space; expand it by moving
                // the highest fixed tile into G, or give up once bare.
                if (!spec.fixed_tiles.empty()) {
                    const int moved = spec.fixed_tiles.back();
                    spec.fixed_tiles.pop_back();
                    spec.goal_tiles.insert(spec.goal_tiles.begin(), moved);
                    ++stats.expansions;
                    attempts = 0;
                } else {
                    stats.correct_tiles = board.correct_tiles();
                    stats.outcome = Outcome::Loss;
                    return stats;
                }
            }
        }
    }

    stats.win = board.is_solved();
    stats.correct_tiles = board.correct_tiles();
    stats.outcome = stats.win ? Outcome::Win : Outcome::Loss;
    return stats;
}

void MiniEpisodeLearner::train(Rng& rng, const MetricsSink& sink) {
    for (long ep = 0; ep < cfg_.episodes; ++ep) {
        SlidingBoard board = FifteenEnv::shuffled_board(cfg_.n, cfg_.level, rng);
        const MiniEpisodeStats stats = run_episode(board, rng, true);
        if (sink) {
            EpisodeMetrics m;
            m.episode = ep;
            m.phase = Phase::Train;
            m.steps = stats.moves;
            m.total_reward = stats.total_reward;
            m.outcome = stats.outcome;
            m.epsilon = cfg_.epsilon;
            m.lr = cfg_.alpha;
            m.game_metric = stats.correct_tiles;
            sink(m);
        }
    }
}

} // namespace qrl
