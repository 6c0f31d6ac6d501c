#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qrl/metrics.hpp"
#include "qrl/rng.hpp"

namespace qrl {

// Sparse Q-table: rows materialize lazily at first touch with zeros, so
// terminal and unseen states read as zero without allocation.
class QTable {
public:
    explicit QTable(int action_count) : action_count_(action_count) {}

    int action_count() const { return action_count_; }
    std::size_t size() const { return rows_.size(); }

    std::vector<double>& row(const std::string& key) {
        auto [it, inserted] = rows_.try_emplace(key);
        if (inserted) it->second.assign(static_cast<std::size_t>(action_count_), 0.0);
        return it->second;
    }

    const std::vector<double>* find(const std::string& key) const {
        auto it = rows_.find(key);
        return it == rows_.end() ? nullptr : &it->second;
    }

    double value(const std::string& key, int action) const {
        const auto* r = find(key);
        return r ? (*r)[static_cast<std::size_t>(action)] : 0.0;
    }

    double max_value(const std::string& key) const {
        const auto* r = find(key);
        if (!r) return 0.0;
        double best = (*r)[0];
        for (double v : *r) best = best > v ? best : v;
        return best;
    }

    const std::unordered_map<std::string, std::vector<double>>& rows() const { return rows_; }

    // Checkpoint format: header "QTABLE v1 <game> <action-count>", then
    // one line per state: "<state-key>\t<q0>,<q1>,...".
    void save(const std::string& path, const std::string& game) const;
    static QTable load(const std::string& path, std::string* game_out = nullptr);

private:
    int action_count_;
    std::unordered_map<std::string, std::vector<double>> rows_;
};

// Epsilon-greedy over one Q row: uniform random action with probability
// epsilon, otherwise argmax with ties broken by the lowest index.
int epsilon_greedy(const std::vector<double>& q_row, double epsilon, Rng& rng);

// Argmax with lowest-index tie break.
int argmax_row(const std::vector<double>& q_row);

// One-step Q-learning update. The bootstrap term is zero when the next
// state is terminal.
void q_update(QTable& table, const std::string& s, int a, double r, const std::string& s_next,
              bool next_terminal, double alpha, double gamma);

struct LearnerConfig {
    double alpha = 0.5;
    double gamma = 0.7;
    double epsilon = 0.1;
    long episodes = 1000000;
    int move_budget = 256;

    void validate() const;
};

class Env;

// Figure-of-merit tabular training loop over any env with string state
// keys. Per-episode metrics flow through the sink when provided.
QTable train_tabular(Env& env, const LearnerConfig& config, Rng& rng, const MetricsSink& sink = {});

} // namespace qrl
