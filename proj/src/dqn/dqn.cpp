#include "qrl/dqn.hpp"

#include <cmath>
#include <stdexcept>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace qrl {

void tune_allocator() {
#if defined(__GLIBC__)
    static const bool done = [] {
        mallopt(M_MMAP_THRESHOLD, 128 << 20);
        mallopt(M_TRIM_THRESHOLD, 128 << 20);
        return true;
    }();
    (void)done;
#endif
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
    data_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
    if (batch > data_.size()) throw std::invalid_argument("replay buffer underfilled for batch");
    std::vector<std::size_t> idx(batch);
    for (std::size_t& i : idx) i = rng.below(data_.size());
    return idx;
}

std::vector<double> compute_targets(const nn::NetworkSpec& net, const nn::ParameterSet& params,
                                    const Env& env, const ReplayBuffer& buffer,
                                    const std::vector<std::size_t>& indices, double gamma) {
    if (indices.empty()) throw std::invalid_argument("compute_targets needs a nonempty batch");
    std::vector<double> targets(indices.size());

    // gamma = 0 is pure reward regression; skip the bootstrap forward pass
    // so the result is exactly the rewards, independent of the network.
    std::vector<Tensor> next_obs;
    std::vector<std::size_t> next_slot;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const Transition& t = buffer.at(indices[k]);
        targets[k] = t.r;
        if (gamma != 0.0 && !t.terminal) {
            next_obs.push_back(env.decode_observation(t.s_next));
            next_slot.push_back(k);
        }
    }
    if (!next_obs.empty()) {
        const Tensor q = nn::forward(net, params, nn::stack_observations(next_obs));
        for (std::size_t i = 0; i < next_slot.size(); ++i) {
            double best = q.data[i * static_cast<std::size_t>(net.output_size)];
            for (int a = 1; a < net.output_size; ++a)
                best = std::max(best, q.data[i * static_cast<std::size_t>(net.output_size) +
                                             static_cast<std::size_t>(a)]);
            targets[next_slot[i]] += gamma * best;
        }
    }
    return targets;
}

void DQNConfig::validate() const {
    if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
    if (static_cast<std::size_t>(batch_size) > prefill || prefill > buffer_capacity)
        throw std::invalid_argument("need batch-size <= prefill <= buffer-capacity");
    if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
    if (train_every <= 0) throw std::invalid_argument("train-every must be positive");
    if (grad_clip_norm < 0.0) throw std::invalid_argument("grad-clip norm must be non-negative");
    if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
    if (max_episode_steps < 0) throw std::invalid_argument("max episode steps must be non-negative");
    if (eval_every < 0 || eval_episodes < 0) throw std::invalid_argument("eval settings must be non-negative");
    if (eval_every > 0 && eval_episodes == 0)
        throw std::invalid_argument("eval-every set but eval-episodes is zero");
}

DQNConfig minesweeper_dqn_preset() {
    DQNConfig c;
    c.gamma = 0.0;
    c.epsilon_schedule = nn::Schedule::linear_anneal(1.0, 0.1, 250000);
    c.lr_schedule = nn::Schedule::step_drops(0.001, 250000, 500000);
    c.buffer_capacity = 100000;
    c.prefill = 10000;
    c.episodes = 1000000;
    c.max_episode_steps = 1024; // 4x the cell count; greedy loops otherwise
    return c;
}

DQNConfig g2048_dqn_preset() {
    DQNConfig c;
    c.gamma = 0.9;
    c.epsilon_schedule = nn::Schedule::multiplicative_every_k(0.9, 0.995, 2500);
    c.lr_schedule = nn::Schedule::exponential_staircase(0.0005, 0.9, 25000);
    c.buffer_capacity = 100000;
    c.prefill = 10000;
    c.episodes = 200000;
    c.max_episode_steps = 3000; // a full board takes well under this
    return c;
}

DQNConfig sudoku_dqn_preset() {
    DQNConfig c;
    c.gamma = 0.0;
    c.epsilon_schedule = nn::Schedule::linear_anneal(1.0, 0.1, 300000);
    c.lr_schedule = nn::Schedule::step_drops(0.001, 300000, 600000);
    c.buffer_capacity = 100000;
    c.prefill = 10000;
    c.episodes = 300000;
    return c; // the environment itself ends episodes at 162 moves
}

double game_metric_from_info(const std::map<std::string, double>& info) {
    for (const char* key : {"max_tile", "correct_tiles", "filled_cells", "revealed_fraction"})
        if (auto it = info.find(key); it != info.end()) return it->second;
    return 0.0;
}

namespace {

int greedy_net_action(const Env& env, const nn::NetworkSpec& net, const nn::ParameterSet& params) {
    std::vector<Tensor> one{env.observation()};
    const Tensor q = nn::forward(net, params, nn::stack_observations(one));
    int best = 0;
    for (int a = 1; a < net.output_size; ++a)
        if (q.data[static_cast<std::size_t>(a)] > q.data[static_cast<std::size_t>(best)]) best = a;
    return best;
}

Outcome outcome_of(const Env& env) {
    switch (env.terminal()) {
        case Terminal::Win: return Outcome::Win;
        case Terminal::Loss: return Outcome::Loss;
        case Terminal::Ongoing: return Outcome::Timeout;
    }
    return Outcome::Timeout;
}

void check_compat(const Env& env, const nn::NetworkSpec& net) {
    const auto s = env.observation_shape();
    if (net.output_size != env.action_count() || s[0] != net.input_shape[0] ||
        s[1] != net.input_shape[1] || s[2] != net.input_shape[2])
        throw std::invalid_argument("environment/network shape mismatch");
}

} // namespace

EpisodeMetrics run_greedy_episode(Env& env, const nn::NetworkSpec& net,
                                  const nn::ParameterSet& params, std::uint64_t seed,
                                  long max_steps) {
    check_compat(env, net);
    env.reset(seed);
    EpisodeMetrics m;
    m.phase = Phase::Eval;
    m.epsilon = 0.0;
    std::string prev_key = env.state_key();
    bool looped = false;
    while (env.terminal() == Terminal::Ongoing && (max_steps == 0 || m.steps < max_steps)) {
        const StepResult r = env.step(greedy_net_action(env, net, params));
        m.total_reward += r.reward;
        ++m.steps;
        m.game_metric = game_metric_from_info(r.info);
        // A greedy policy is deterministic: an action that leaves the state
        // unchanged would repeat forever, so cut the episode here.
        std::string key = env.state_key();
        if (key == prev_key) {
            looped = true;
            break;
        }
        prev_key = std::move(key);
    }
    m.outcome = looped ? Outcome::Timeout : outcome_of(env);
    return m;
}

DQNResult train_dqn(Env& env, const nn::NetworkSpec& net, const DQNConfig& config, Rng& rng,
                    const MetricsSink& sink, nn::ParameterSet initial_params,
                    long initial_env_steps) {
    config.validate();
    check_compat(env, net);
    tune_allocator();

    nn::ParameterSet params = initial_params.empty() ? nn::init_params(net, rng)
                                                     : std::move(initial_params);
    ReplayBuffer buffer(config.buffer_capacity);

    // Jump-start with uniform-random experience.
    while (buffer.size() < config.prefill) {
        env.reset(rng.derive());
        long steps = 0;
        while (env.terminal() == Terminal::Ongoing && buffer.size() < config.prefill &&
               (config.max_episode_steps == 0 || steps < config.max_episode_steps)) {
            Transition t;
            t.s = env.compact_state();
            t.a = static_cast<int>(rng.below(static_cast<std::uint64_t>(env.action_count())));
            const StepResult r = env.step(t.a);
            t.s_next = env.compact_state();
            t.r = r.reward;
            t.terminal = r.terminal != Terminal::Ongoing;
            buffer.push(std::move(t));
            ++steps;
        }
    }

    DQNResult result;
    result.env_steps = initial_env_steps;

    for (long ep = 0; ep < config.episodes; ++ep) {
        env.reset(rng.derive());
        EpisodeMetrics m;
        m.episode = ep;
        m.epsilon = config.epsilon_schedule.value(result.env_steps);
        m.lr = config.lr_schedule.value(result.env_steps);

        double loss_sum = 0.0;
        long loss_count = 0;
        while (env.terminal() == Terminal::Ongoing &&
               (config.max_episode_steps == 0 || m.steps < config.max_episode_steps)) {
            const double eps = config.epsilon_schedule.value(result.env_steps);
            Transition t;
            t.s = env.compact_state();
            // Sampling the random branch first skips the forward pass on
            // exploration steps.
            t.a = rng.bernoulli(eps)
                      ? static_cast<int>(rng.below(static_cast<std::uint64_t>(env.action_count())))
                      : greedy_net_action(env, net, params);
            const StepResult r = env.step(t.a);
            t.s_next = env.compact_state();
            t.r = r.reward;
            t.terminal = r.terminal != Terminal::Ongoing;
            buffer.push(std::move(t));
            ++result.env_steps;
            ++m.steps;
            m.total_reward += r.reward;
            m.game_metric = game_metric_from_info(r.info);

            if (result.env_steps % config.train_every == 0) {
                const auto idx = buffer.sample_indices(static_cast<std::size_t>(config.batch_size), rng);
                const auto targets = compute_targets(net, params, env, buffer, idx, config.gamma);
                std::vector<nn::QLossItem> batch(idx.size());
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    const Transition& tr = buffer.at(idx[k]);
                    batch[k].observation = env.decode_observation(tr.s);
                    batch[k].action = tr.a;
                    batch[k].target = targets[k];
                }
                const double lr = config.lr_schedule.value(result.env_steps);
                if (lr <= 0.0) throw std::runtime_error("learning-rate schedule produced non-positive rate");
                nn::ParameterSet grads;
                loss_sum += nn::q_loss_and_gradient(net, params, batch, grads);
                if (config.grad_clip_norm > 0.0) {
                    double sq = 0.0;
                    for (const auto& g : grads) {
                        for (double v : g.w.data) sq += v * v;
                        for (double v : g.b.data) sq += v * v;
                    }
                    const double norm = std::sqrt(sq);
                    if (norm > config.grad_clip_norm) {
                        const double scale = config.grad_clip_norm / norm;
                        for (auto& g : grads) {
                            for (double& v : g.w.data) v *= scale;
                            for (double& v : g.b.data) v *= scale;
                        }
                    }
                }
                nn::sgd_step(params, grads, lr);
                ++loss_count;
                ++result.train_steps;
            }
        }
        m.outcome = outcome_of(env);
        m.loss_value = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        if (sink) sink(m);

        if (config.eval_every > 0 && (ep + 1) % config.eval_every == 0) {
            for (long e = 0; e < config.eval_episodes; ++e) {
                EpisodeMetrics em = run_greedy_episode(env, net, params, rng.derive(),
                                                       config.max_episode_steps);
                em.episode = ep;
                em.lr = config.lr_schedule.value(result.env_steps);
                if (sink) sink(em);
            }
        }
    }

    result.params = std::move(params);
    return result;
}

} // namespace qrl
