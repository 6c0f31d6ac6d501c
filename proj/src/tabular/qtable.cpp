#include "qrl/qtable.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qrl/env.hpp"

namespace qrl {

const char* to_string(Phase p) { return p == Phase::Train ? "train" : "eval"; }

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Win: return "win";
        case Outcome::Loss: return "loss";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

int argmax_row(const std::vector<double>& q_row) {
    if (q_row.empty()) throw std::invalid_argument("empty Q row");
    int best = 0;
    for (int i = 1; i < static_cast<int>(q_row.size()); ++i)
        if (q_row[static_cast<std::size_t>(i)] > q_row[static_cast<std::size_t>(best)]) best = i;
    return best;
}

int epsilon_greedy(const std::vector<double>& q_row, double epsilon, Rng& rng) {
    if (q_row.empty()) throw std::invalid_argument("empty Q row");
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
    if (epsilon > 0.0 && rng.bernoulli(epsilon)) return static_cast<int>(rng.below(q_row.size()));
    return argmax_row(q_row);
}

void q_update(QTable& table, const std::string& s, int a, double r, const std::string& s_next,
              bool next_terminal, double alpha, double gamma) {
    const double bootstrap = next_terminal ? 0.0 : table.max_value(s_next);
    std::vector<double>& row = table.row(s);
    double& q = row[static_cast<std::size_t>(a)];
    q += alpha * (r + gamma * bootstrap - q);
}

void QTable::save(const std::string& path, const std::string& game) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write qtable checkpoint: " + path);
    out << "QTABLE v1 " << game << ' ' << action_count_ << '\n';
    char buf[64];
    for (const auto& [key, row] : rows_) {
        out << key << '\t';
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            if (i) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

QTable QTable::load(const std::string& path, std::string* game_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read qtable checkpoint: " + path);
    std::string magic, version, game;
    int actions = 0;
    in >> magic >> version >> game >> actions;
    if (magic != "QTABLE" || version != "v1" || actions <= 0)
        throw std::runtime_error("bad qtable checkpoint header: " + path);
    in.ignore(1, '\n');
    if (game_out) *game_out = game;

    QTable t(actions);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw std::runtime_error("bad qtable line: " + line);
        std::vector<double>& row = t.row(line.substr(0, tab));
        std::stringstream ss(line.substr(tab + 1));
        std::string tok;
        std::size_t i = 0;
        while (std::getline(ss, tok, ',')) {
            if (i >= row.size()) throw std::runtime_error("qtable row too long: " + line);
            row[i++] = std::stod(tok);
        }
        if (i != row.size()) throw std::runtime_error("qtable row too short: " + line);
    }
    return t;
}

void LearnerConfig::validate() const {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in [0, 1]");
    if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
    if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
    if (move_budget <= 0) throw std::invalid_argument("move budget must be positive");
}

QTable train_tabular(Env& env, const LearnerConfig& config, Rng& rng, const MetricsSink& sink) {
    config.validate();
    QTable table(env.action_count());

    for (long ep = 0; ep < config.episodes; ++ep) {
        env.reset(rng.derive());
        EpisodeMetrics m;
        m.episode = ep;
        m.epsilon = config.epsilon;
        m.lr = config.alpha;

        std::string state = env.state_key();
        double game_metric = 0.0;
        while (env.terminal() == Terminal::Ongoing && m.steps < config.move_budget) {
            const int a = epsilon_greedy(table.row(state), config.epsilon, rng);
            const StepResult r = env.step(a);
            const std::string next = env.state_key();
            q_update(table, state, a, r.reward, next, r.terminal != Terminal::Ongoing, config.alpha,
                     config.gamma);
            state = next;
            m.total_reward += r.reward;
            ++m.steps;
            if (auto it = r.info.find("correct_tiles"); it != r.info.end()) game_metric = it->second;
        }
        m.outcome = env.terminal() == Terminal::Win    ? Outcome::Win
                    : env.terminal() == Terminal::Loss ? Outcome::Loss
                                                       : Outcome::Timeout;
        m.game_metric = game_metric;
        if (sink) sink(m);
    }
    return table;
}

} // namespace qrl
