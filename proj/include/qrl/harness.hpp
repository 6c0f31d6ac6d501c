#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrl/dqn.hpp"
#include "qrl/env.hpp"
#include "qrl/fifteen.hpp"
#include "qrl/qtable.hpp"

namespace qrl {

enum class Algorithm { Tabular, Hierarchical, DQN };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// One training/evaluation run, parsed from a `key = value` config file.
// Defaults follow the per-game hyperparameters; unknown keys are rejected.
struct RunConfig {
    GameId game = GameId::Fifteen;
    DifficultyClass::Level difficulty = DifficultyClass::Level::Easy;
    bool difficulty_set = false; // explicit key; gates sudoku pool filtering
    Algorithm algorithm = Algorithm::Tabular;
    Encoding encoding = Encoding::OneHot;
    std::uint64_t seed = 1;
    std::string out_dir = "qrl-run";
    long eval_every = 1000;
    long eval_episodes = 200;
    bool timing = false; // wall_ms stays 0 when off, keeping runs byte-reproducible
    bool trace = false;  // per-episode action traces for the replay re-sum oracle

    // fifteen
    int board_n = 4;
    bool mini_episodes = true; // the paper's subproblem ladder; off = flat state-space Q
    FifteenRewards rewards = FifteenRewards::Original;

    // minesweeper
    double density = 0.15;
    bool density_set = false; // otherwise follows the difficulty class

    // sudoku
    std::string sudoku_file; // puzzle pool; empty = generate
    int sudoku_givens = 0;   // 0 = difficulty-driven generation
    int sudoku_pool = 100;

    LearnerConfig tabular;
    DQNConfig dqn;

    void validate() const;
    std::string echo() const; // canonical key = value listing (manifest)
};

RunConfig default_config(GameId game);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Environment/network factories for the configured run. The rng seeds
// generated sudoku pools.
std::unique_ptr<Env> make_env(const RunConfig& cfg, Rng& rng);
nn::NetworkSpec make_network(const RunConfig& cfg);

// Executes the configured trainer; writes metrics.csv, a checkpoint, a
// run manifest and (when enabled) an action-trace file into out_dir.
// Throws on failure; the CLI maps exceptions to exit codes.
void run_training(const RunConfig& cfg);

struct EvalSummary {
    std::string game;
    long episodes = 0;
    double win_rate = 0.0;
    double mean_reward = 0.0;
    double mean_steps = 0.0;
    // 2048 only: fraction of episodes whose max tile reached each threshold.
    std::vector<std::pair<int, double>> thresholds;

    std::string text() const;
};

// Greedy evaluation of a saved checkpoint (QTABLE or QRLNET1 format). The
// optional config overrides the default environment for the game.
EvalSummary evaluate_checkpoint(const std::string& checkpoint_path, long episodes,
                                std::uint64_t seed,
                                const std::optional<RunConfig>& cfg = std::nullopt);

// Loss / smoothed-reward / eval-win-rate curves as a standalone SVG.
void emit_plots(const std::string& metrics_csv, const std::string& out_path);

// metrics.csv plumbing, shared with the tests.
std::string metrics_header();
std::string format_metrics_row(const EpisodeMetrics& m);
std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path);

// Trailing-window rolling mean (window 100 in the plots).
std::vector<double> rolling_mean(const std::vector<double>& xs, std::size_t window);

} // namespace qrl
