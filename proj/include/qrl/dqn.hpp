#pragma once

#include <cstdint>
#include <vector>

#include "qrl/env.hpp"
#include "qrl/metrics.hpp"
#include "qrl/nn/network.hpp"
#include "qrl/nn/schedule.hpp"
#include "qrl/rng.hpp"

namespace qrl {

// One step of experience. States are kept in the environment's compact byte
// encoding and widened to observation tensors only when a batch is built;
// this keeps a 100k-slot buffer in the tens of megabytes.
struct Transition {
    std::vector<std::uint8_t> s;
    std::vector<std::uint8_t> s_next;
    int a = 0;
    double r = 0.0;
    bool terminal = false;
};

// Fixed-capacity FIFO ring with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; }

    // Indices into the buffer; deterministic given the rng state.
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> data_;
};

// target = r for terminal transitions, else r + gamma * max_a Q(s', a),
// evaluated with the current parameters (no separate target network).
std::vector<double> compute_targets(const nn::NetworkSpec& net, const nn::ParameterSet& params,
                                    const Env& env, const ReplayBuffer& buffer,
                                    const std::vector<std::size_t>& indices, double gamma);

struct DQNConfig {
    int batch_size = 32;
    double gamma = 0.0;
    nn::Schedule epsilon_schedule = nn::Schedule::constant(0.1);
    nn::Schedule lr_schedule = nn::Schedule::constant(0.001);
    std::size_t buffer_capacity = 100000;
    std::size_t prefill = 10000;
    int train_every = 1;
    // Global L2 gradient-norm clip; 0 disables. Plain SGD on the raw MSE
    // gradient diverges at the preset rates (per-step rewards reach the
    // hundreds), so the presets enable this.
    double grad_clip_norm = 10.0;
    long episodes = 1000;
    long max_episode_steps = 0; // 0 = until the environment terminates
    long eval_every = 0;        // episodes between greedy sweeps; 0 = off
    long eval_episodes = 0;

    void validate() const; // batch <= prefill <= capacity, gamma in [0,1)
};

// Paper presets (schedule horizons in environment steps).
DQNConfig minesweeper_dqn_preset();
DQNConfig g2048_dqn_preset();
DQNConfig sudoku_dqn_preset();

struct DQNResult {
    nn::ParameterSet params;
    long env_steps = 0;   // training steps taken (drives the schedules)
    long train_steps = 0; // gradient updates
};

// Plays one episode with the greedy policy (epsilon = 0), no learning.
EpisodeMetrics run_greedy_episode(Env& env, const nn::NetworkSpec& net,
                                  const nn::ParameterSet& params, std::uint64_t seed,
                                  long max_steps = 0);

// Full DQN loop: uniform-random prefill, epsilon-greedy rollouts, one SGD
// step on a sampled batch every `train_every` environment steps. Training
// episodes stream through `sink` with phase=train; greedy sweeps every
// `eval_every` episodes stream with phase=eval.
DQNResult train_dqn(Env& env, const nn::NetworkSpec& net, const DQNConfig& config, Rng& rng,
                    const MetricsSink& sink = {}, nn::ParameterSet initial_params = {},
                    long initial_env_steps = 0);

// Shared helper: game metric from a step-info map (max tile, correct tiles,
// filled cells or revealed fraction depending on the game).
double game_metric_from_info(const std::map<std::string, double>& info);

// Raises glibc's mmap/trim thresholds so the per-step tensor traffic stays
// on the fast heap path (roughly halves DQN wall time). Idempotent, no-op
// on other libcs.
void tune_allocator();

} // namespace qrl
