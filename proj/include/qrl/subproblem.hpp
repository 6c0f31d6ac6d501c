#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qrl/fifteen.hpp"
#include "qrl/metrics.hpp"
#include "qrl/qtable.hpp"

namespace qrl {

// G/R subproblem: bring tiles G to their home positions without moving
// tiles R. Tiles outside G and R are anonymized filler; this is what keeps
// the abstract space tractable.
struct SubproblemSpec {
    int n = 4;
    std::vector<int> goal_tiles;  // G, sorted ascending
    std::vector<int> fixed_tiles; // R

    void validate() const; // G and R disjoint, ids in range
};

// Abstract state: positions of the G tiles (in goal_tiles order) plus the
// blank position.
struct AbstractState {
    std::vector<std::uint8_t> pos;

    std::string key() const;
    bool operator==(const AbstractState& o) const { return pos == o.pos; }
};

// Transition system of a G/R subproblem. R tiles become immovable walls at
// their positions on the reference board.
class AbstractSpace {
public:
    AbstractSpace(SubproblemSpec spec, const SlidingBoard& reference);

    const SubproblemSpec& spec() const { return spec_; }

    AbstractState project(const SlidingBoard& board) const;
    bool is_goal(const AbstractState& s) const;
    std::vector<int> legal_actions(const AbstractState& s) const;
    AbstractState apply(const AbstractState& s, int action) const;

private:
    SubproblemSpec spec_;
    std::vector<bool> wall_;
    std::vector<int> homes_; // home cell per G tile
};

struct RestrictedValueResult {
    std::unordered_map<std::string, double> values; // gamma^d to goal; 0 iff unreachable
    double start_value = 0.0;
    std::size_t state_count = 0;
};

// Exact value iteration over the abstract states reachable from `start`.
// Goal states are terminal with value 1; elsewhere V = gamma * max V(next),
// iterated to sup-norm residual < 1e-10. V = 0 exactly when the goal is
// unreachable.
RestrictedValueResult restricted_q_iteration(const AbstractSpace& space, const AbstractState& start,
                                             double gamma, std::size_t state_cap = 10000000);

// Greedy policy action for the value table; -1 when no legal action
// improves on value zero (goal unreachable or isolated blank).
int greedy_action(const AbstractSpace& space, const std::unordered_map<std::string, double>& values,
                  const AbstractState& s);

struct HierarchicalResult {
    std::vector<Slide> moves;
    bool solved = false;
    int expansions = 0; // G-expansion events across all tiles
};

// Successive tile placement: for i = 1..n*n-1 solve G={i}, R={1..i-1} by
// restricted value iteration, expanding G with max(R) whenever the start
// value is zero, then follow the greedy policy.
HierarchicalResult hierarchical_solve(const SlidingBoard& start, double gamma = 0.9,
                                      std::size_t state_cap = 10000000);

struct MiniEpisodeConfig {
    int n = 4;
    DifficultyClass::Level level = DifficultyClass::Level::Easy;
    double alpha = 0.5;
    double gamma = 0.7;
    double epsilon = 0.1;
    long episodes = 100000;
    int retries = 3;          // failed attempts per G/R space before expanding
    // Safety valve across the whole episode. The per-mini-episode budgets
    // carry the loss rule; this only stops runaway wandering, so it is sized
    // well above the cost of a full retry/expansion recovery.
    int overall_move_cap = 8192;

    void validate() const;
};

struct MiniEpisodeStats {
    bool win = false;
    long moves = 0;
    double total_reward = 0.0;
    int expansions = 0;
    int correct_tiles = 0;
    Outcome outcome = Outcome::Loss;
};

// Learning analogue of hierarchical_solve: per mini-episode k the agent
// has k^2 moves to bring tiles {1..k} home, earning +1/-1 terminal reward,
// with G-expansion on loss. Q rows are keyed by (G, abstract state) and
// shared across episodes.
class MiniEpisodeLearner {
public:
    explicit MiniEpisodeLearner(MiniEpisodeConfig cfg);

    // Runs one full episode on `board`. learn=false plays greedily without
    // updates (evaluation).
    MiniEpisodeStats run_episode(SlidingBoard board, Rng& rng, bool learn);

    void train(Rng& rng, const MetricsSink& sink = {});

    QTable& table() { return table_; }
    const MiniEpisodeConfig& config() const { return cfg_; }

private:
    MiniEpisodeConfig cfg_;
    QTable table_;
};

} // namespace qrl
