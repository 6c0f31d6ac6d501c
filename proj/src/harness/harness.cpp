#include "qrl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qrl/game2048.hpp"
#include "qrl/minesweeper.hpp"
#include "qrl/nn/checkpoint.hpp"
#include "qrl/subproblem.hpp"
#include "qrl/sudoku.hpp"

namespace fs = std::filesystem;

namespace qrl {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw std::invalid_argument("bad boolean for " + key + ": " + v);
}

} // namespace

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Tabular: return "tabular";
        case Algorithm::Hierarchical: return "hierarchical";
        case Algorithm::DQN: return "dqn";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "tabular") return Algorithm::Tabular;
    if (s == "hierarchical") return Algorithm::Hierarchical;
    if (s == "dqn") return Algorithm::DQN;
    throw std::invalid_argument("unknown algorithm: " + s);
}

RunConfig default_config(GameId game) {
    RunConfig c;
    c.game = game;
    switch (game) {
        case GameId::Fifteen:
            c.algorithm = Algorithm::Tabular;
            c.encoding = Encoding::OneHot;
            break;
        case GameId::Minesweeper:
            c.algorithm = Algorithm::DQN;
            c.encoding = Encoding::Condensed;
            c.dqn = minesweeper_dqn_preset();
            break;
        case GameId::G2048:
            c.algorithm = Algorithm::DQN;
            c.encoding = Encoding::OneHot;
            c.dqn = g2048_dqn_preset();
            break;
        case GameId::Sudoku:
            c.algorithm = Algorithm::DQN;
            c.encoding = Encoding::OneHot;
            c.dqn = sudoku_dqn_preset();
            break;
    }
    return c;
}

void RunConfig::validate() const {
    if (algorithm == Algorithm::Hierarchical && game != GameId::Fifteen)
        throw std::invalid_argument("hierarchical is only defined for fifteen");
    if (algorithm == Algorithm::DQN && game == GameId::Fifteen)
        throw std::invalid_argument("fifteen has no DQN architecture; use tabular or hierarchical");
    if (mini_episodes && trace && game == GameId::Fifteen && algorithm == Algorithm::Tabular)
        throw std::invalid_argument("trace requires flat tabular or dqn runs (set mini_episodes = off)");
    if (board_n < 2 || board_n > 6) throw std::invalid_argument("board size out of range");
    if (density_set && (density <= 0.0 || density >= 1.0))
        throw std::invalid_argument("density must be in (0, 1)");
    if (sudoku_givens < 0 || sudoku_givens > 80) throw std::invalid_argument("sudoku_givens out of range");
    if (sudoku_pool <= 0) throw std::invalid_argument("sudoku_pool must be positive");
    if (eval_every < 0 || eval_episodes < 0) throw std::invalid_argument("eval settings must be non-negative");
    tabular.validate();
    if (algorithm == Algorithm::DQN) dqn.validate();
}

std::string RunConfig::echo() const {
    std::ostringstream ss;
    ss << "game = " << to_string(game) << '\n';
    ss << "difficulty = " << to_string(difficulty) << '\n';
    ss << "algorithm = " << to_string(algorithm) << '\n';
    ss << "encoding = " << to_string(encoding) << '\n';
    ss << "seed = " << seed << '\n';
    ss << "eval_every = " << eval_every << '\n';
    ss << "eval_episodes = " << eval_episodes << '\n';
    ss << "timing = " << (timing ? "on" : "off") << '\n';
    ss << "trace = " << (trace ? "on" : "off") << '\n';
    if (game == GameId::Fifteen) {
        ss << "n = " << board_n << '\n';
        ss << "mini_episodes = " << (mini_episodes ? "on" : "off") << '\n';
        ss << "rewards = " << (rewards == FifteenRewards::Original ? "original" : "sparse") << '\n';
    }
    if (game == GameId::Minesweeper) ss << "density = " << fmt(density) << '\n';
    if (game == GameId::Sudoku) {
        if (!sudoku_file.empty()) ss << "sudoku_file = " << sudoku_file << '\n';
        ss << "sudoku_givens = " << sudoku_givens << '\n';
        ss << "sudoku_pool = " << sudoku_pool << '\n';
    }
    if (algorithm == Algorithm::DQN) {
        ss << "batch_size = " << dqn.batch_size << '\n';
        ss << "gamma = " << fmt(dqn.gamma) << '\n';
        ss << "epsilon_schedule = " << dqn.epsilon_schedule.describe() << '\n';
        ss << "lr_schedule = " << dqn.lr_schedule.describe() << '\n';
        ss << "buffer_capacity = " << dqn.buffer_capacity << '\n';
        ss << "prefill = " << dqn.prefill << '\n';
        ss << "train_every = " << dqn.train_every << '\n';
        ss << "grad_clip_norm = " << fmt(dqn.grad_clip_norm) << '\n';
        ss << "episodes = " << dqn.episodes << '\n';
        ss << "max_episode_steps = " << dqn.max_episode_steps << '\n';
    } else {
        ss << "alpha = " << fmt(tabular.alpha) << '\n';
        ss << "gamma = " << fmt(tabular.gamma) << '\n';
        ss << "epsilon = " << fmt(tabular.epsilon) << '\n';
        ss << "episodes = " << tabular.episodes << '\n';
        ss << "move_budget = " << tabular.move_budget << '\n';
    }
    return ss.str();
}

RunConfig parse_config_text(const std::string& text) {
    // First pass: collect key/value pairs so `game` can seed the defaults.
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
        kv.emplace_back(key, value);
    }

    GameId game = GameId::Fifteen;
    bool game_seen = false;
    for (const auto& [k, v] : kv)
        if (k == "game") {
            game = game_from_string(v);
            game_seen = true;
        }
    if (!game_seen) throw std::invalid_argument("config must set `game`");

    RunConfig c = default_config(game);
    lineno = 0;
    for (const auto& [key, value] : kv) {
        ++lineno;
        try {
            if (key == "game") {
                // already applied
            } else if (key == "difficulty") {
                c.difficulty = level_from_string(value);
                c.difficulty_set = true;
                if (c.game == GameId::Minesweeper && !c.density_set)
                    c.density = MinesweeperConfig::default_density(c.difficulty);
            } else if (key == "algorithm") {
                c.algorithm = algorithm_from_string(value);
            } else if (key == "encoding") {
                c.encoding = encoding_from_string(value);
            } else if (key == "seed") {
                c.seed = std::stoull(value);
            } else if (key == "out_dir") {
                c.out_dir = value;
            } else if (key == "eval_every") {
                c.eval_every = std::stol(value);
            } else if (key == "eval_episodes") {
                c.eval_episodes = std::stol(value);
            } else if (key == "timing") {
                c.timing = parse_bool(value, key);
            } else if (key == "trace") {
                c.trace = parse_bool(value, key);
            } else if (key == "n") {
                c.board_n = std::stoi(value);
            } else if (key == "mini_episodes") {
                c.mini_episodes = parse_bool(value, key);
            } else if (key == "rewards") {
                if (value == "original") c.rewards = FifteenRewards::Original;
                else if (value == "sparse") c.rewards = FifteenRewards::Sparse;
                else throw std::invalid_argument("rewards must be original or sparse");
            } else if (key == "density") {
                c.density = std::stod(value);
                c.density_set = true;
            } else if (key == "sudoku_file") {
                c.sudoku_file = value;
            } else if (key == "sudoku_givens") {
                c.sudoku_givens = std::stoi(value);
            } else if (key == "sudoku_pool") {
                c.sudoku_pool = std::stoi(value);
            } else if (key == "alpha") {
                c.tabular.alpha = std::stod(value);
            } else if (key == "gamma") {
                const double g = std::stod(value);
                if (g < 0.0 || g >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
                c.tabular.gamma = g;
                c.dqn.gamma = g;
            } else if (key == "epsilon") {
                const double e = std::stod(value);
                if (e < 0.0 || e > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
                c.tabular.epsilon = e;
                nn::Schedule s;
                s.kind = nn::Schedule::Kind::Constant;
                s.base = e;
                c.dqn.epsilon_schedule = s;
            } else if (key == "epsilon_schedule") {
                c.dqn.epsilon_schedule = nn::Schedule::parse(value);
            } else if (key == "lr") {
                c.dqn.lr_schedule = nn::Schedule::constant(std::stod(value));
            } else if (key == "lr_schedule") {
                c.dqn.lr_schedule = nn::Schedule::parse(value);
            } else if (key == "episodes") {
                const long n = std::stol(value);
                c.tabular.episodes = n;
                c.dqn.episodes = n;
            } else if (key == "move_budget") {
                c.tabular.move_budget = std::stoi(value);
            } else if (key == "batch_size") {
                c.dqn.batch_size = std::stoi(value);
            } else if (key == "buffer_capacity") {
                c.dqn.buffer_capacity = static_cast<std::size_t>(std::stoull(value));
            } else if (key == "prefill") {
                c.dqn.prefill = static_cast<std::size_t>(std::stoull(value));
            } else if (key == "train_every") {
                c.dqn.train_every = std::stoi(value);
            } else if (key == "grad_clip_norm") {
                c.dqn.grad_clip_norm = std::stod(value);
            } else if (key == "max_episode_steps") {
                c.dqn.max_episode_steps = std::stol(value);
            } else {
                throw std::invalid_argument("unknown config key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad value for config key " + key + ": " + value);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::unique_ptr<Env> make_env(const RunConfig& cfg, Rng& rng) {
    switch (cfg.game) {
        case GameId::Fifteen: {
            FifteenConfig fc;
            fc.n = cfg.board_n;
            fc.level = cfg.difficulty;
            fc.rewards = cfg.rewards;
            fc.move_budget = cfg.tabular.move_budget;
            return std::make_unique<FifteenEnv>(fc);
        }
        case GameId::Minesweeper: {
            MinesweeperConfig mc;
            mc.density = cfg.density_set ? cfg.density
                                         : MinesweeperConfig::default_density(cfg.difficulty);
            mc.encoding = cfg.encoding;
            return std::make_unique<MinesweeperEnv>(mc);
        }
        case GameId::G2048:
            return std::make_unique<G2048Env>();
        case GameId::Sudoku: {
            SudokuConfig sc;
            if (!cfg.sudoku_file.empty()) {
                sc.puzzles = load_sudoku_file(cfg.sudoku_file);
                if (cfg.difficulty_set) sc.level = cfg.difficulty;
            } else {
                const int givens = cfg.sudoku_givens > 0 ? cfg.sudoku_givens
                                   : cfg.difficulty == DifficultyClass::Level::Easy   ? 40
                                   : cfg.difficulty == DifficultyClass::Level::Medium ? 30
                                                                                      : 25;
                std::optional<DifficultyClass::Level> lvl;
                if (cfg.difficulty_set) lvl = cfg.difficulty;
                sc.puzzles.reserve(static_cast<std::size_t>(cfg.sudoku_pool));
                for (int i = 0; i < cfg.sudoku_pool; ++i)
                    sc.puzzles.push_back(generate_sudoku(rng, givens, lvl));
            }
            return std::make_unique<SudokuEnv>(std::move(sc));
        }
    }
    throw std::logic_error("unreachable game id");
}

nn::NetworkSpec make_network(const RunConfig& cfg) {
    switch (cfg.game) {
        case GameId::Minesweeper: {
            const int ch = cfg.encoding == Encoding::OneHot      ? 10
                           : cfg.encoding == Encoding::Condensed ? 2
                                                                 : 1;
            return nn::make_minesweeper_net(16, 16, ch);
        }
        case GameId::G2048:
            return nn::make_2048_net();
        case GameId::Sudoku:
            return nn::make_sudoku_net();
        case GameId::Fifteen:
            break;
    }
    throw std::invalid_argument("no network architecture for this game");
}

std::string metrics_header() {
    return "episode,phase,steps,total_reward,outcome,loss_value,epsilon,lr,game_metric,wall_ms";
}

std::string format_metrics_row(const EpisodeMetrics& m) {
    std::ostringstream ss;
    ss << m.episode << ',' << to_string(m.phase) << ',' << m.steps << ',' << fmt(m.total_reward)
       << ',' << to_string(m.outcome) << ',' << fmt(m.loss_value) << ',' << fmt(m.epsilon) << ','
       << fmt(m.lr) << ',' << fmt(m.game_metric) << ',' << fmt(m.wall_ms);
    return ss.str();
}

std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != metrics_header())
        throw std::runtime_error("bad metrics.csv header in " + path);

    std::vector<EpisodeMetrics> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 10) throw std::runtime_error("bad metrics row: " + line);
        EpisodeMetrics m;
        m.episode = std::stol(f[0]);
        if (f[1] == "train") m.phase = Phase::Train;
        else if (f[1] == "eval") m.phase = Phase::Eval;
        else throw std::runtime_error("bad phase in metrics row: " + line);
        m.steps = std::stol(f[2]);
        m.total_reward = std::stod(f[3]);
        if (f[4] == "win") m.outcome = Outcome::Win;
        else if (f[4] == "loss") m.outcome = Outcome::Loss;
        else if (f[4] == "timeout") m.outcome = Outcome::Timeout;
        else throw std::runtime_error("bad outcome in metrics row: " + line);
        m.loss_value = std::stod(f[5]);
        m.epsilon = std::stod(f[6]);
        m.lr = std::stod(f[7]);
        m.game_metric = std::stod(f[8]);
        m.wall_ms = std::stod(f[9]);
        rows.push_back(m);
    }
    return rows;
}

std::vector<double> rolling_mean(const std::vector<double>& xs, std::size_t window) {
    if (window == 0) throw std::invalid_argument("rolling window must be positive");
    std::vector<double> out(xs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum += xs[i];
        if (i >= window) sum -= xs[i - window];
        const std::size_t n = std::min(i + 1, window);
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

namespace {

// One conformance-fixture record: the state the action was taken in, the
// action, and the observed reward/terminal flag.
struct TraceStep {
    std::string state_key;
    int action = 0;
    double reward = 0.0;
    Terminal terminal = Terminal::Ongoing;
};

struct TraceWriter {
    std::ofstream out;

    void record(long episode, Phase phase, std::uint64_t seed, const std::vector<TraceStep>& steps) {
        out << "# episode " << episode << ' ' << to_string(phase) << ' ' << seed << '\n';
        for (const TraceStep& s : steps)
            out << s.state_key << '\t' << s.action << '\t' << fmt(s.reward) << '\t'
                << to_string(s.terminal) << '\n';
    }
};

// One greedy or learning episode of the flat tabular agent.
EpisodeMetrics tabular_episode(Env& env, QTable& table, const LearnerConfig& lc, bool learn,
                               std::uint64_t seed, Rng& rng, std::vector<TraceStep>* trace_out) {
    env.reset(seed);
    EpisodeMetrics m;
    m.epsilon = learn ? lc.epsilon : 0.0;
    m.lr = lc.alpha;
    m.phase = learn ? Phase::Train : Phase::Eval;
    std::string state = env.state_key();
    while (env.terminal() == Terminal::Ongoing && m.steps < lc.move_budget) {
        const int a = learn ? epsilon_greedy(table.row(state), lc.epsilon, rng)
                            : (table.find(state) ? argmax_row(*table.find(state)) : 0);
        const StepResult r = env.step(a);
        const std::string next = env.state_key();
        if (learn)
            q_update(table, state, a, r.reward, next, r.terminal != Terminal::Ongoing, lc.alpha,
                     lc.gamma);
        if (trace_out) trace_out->push_back({state, a, r.reward, r.terminal});
        state = next;
        m.total_reward += r.reward;
        ++m.steps;
        m.game_metric = game_metric_from_info(r.info);
    }
    m.outcome = env.terminal() == Terminal::Win    ? Outcome::Win
                : env.terminal() == Terminal::Loss ? Outcome::Loss
                                                   : Outcome::Timeout;
    return m;
}

} // namespace

void run_training(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    {
        std::ofstream mf(out / "manifest.txt");
        if (!mf) throw std::runtime_error("cannot write manifest in " + cfg.out_dir);
        mf << "qrl_version = " << kVersion << '\n' << cfg.echo();
    }

    std::ofstream csv(out / "metrics.csv");
    if (!csv) throw std::runtime_error("cannot write metrics.csv in " + cfg.out_dir);
    csv << metrics_header() << '\n';

    TraceWriter trace;
    if (cfg.trace) {
        trace.out.open(out / "trace.tsv");
        if (!trace.out) throw std::runtime_error("cannot write trace.tsv in " + cfg.out_dir);
    }

    Rng rng(cfg.seed);
    using clock = std::chrono::steady_clock;
    auto last = clock::now();
    auto sink = [&](const EpisodeMetrics& row) {
        EpisodeMetrics m = row;
        if (cfg.timing) {
            const auto now = clock::now();
            m.wall_ms = std::chrono::duration<double, std::milli>(now - last).count();
            last = now;
        }
        csv << format_metrics_row(m) << '\n';
    };

    switch (cfg.algorithm) {
        case Algorithm::Hierarchical: {
            for (long ep = 0; ep < cfg.tabular.episodes; ++ep) {
                const SlidingBoard board =
                    FifteenEnv::shuffled_board(cfg.board_n, cfg.difficulty, rng);
                const HierarchicalResult res = hierarchical_solve(board);
                EpisodeMetrics m;
                m.episode = ep;
                m.phase = Phase::Eval;
                m.steps = static_cast<long>(res.moves.size());
                m.outcome = res.solved ? Outcome::Win : Outcome::Loss;
                m.game_metric = res.expansions;
                sink(m);
            }
            break;
        }
        case Algorithm::Tabular: {
            if (cfg.game == GameId::Fifteen && cfg.mini_episodes) {
                MiniEpisodeConfig mc;
                mc.n = cfg.board_n;
                mc.level = cfg.difficulty;
                mc.alpha = cfg.tabular.alpha;
                mc.gamma = cfg.tabular.gamma;
                mc.epsilon = cfg.tabular.epsilon;
                mc.episodes = cfg.tabular.episodes;
                mc.overall_move_cap = cfg.tabular.move_budget;
                MiniEpisodeLearner learner(mc);
                for (long ep = 0; ep < mc.episodes; ++ep) {
                    const SlidingBoard board = FifteenEnv::shuffled_board(mc.n, mc.level, rng);
                    const MiniEpisodeStats st = learner.run_episode(board, rng, true);
                    EpisodeMetrics m;
                    m.episode = ep;
                    m.steps = st.moves;
                    m.total_reward = st.total_reward;
                    m.outcome = st.outcome;
                    m.epsilon = mc.epsilon;
                    m.lr = mc.alpha;
                    m.game_metric = st.correct_tiles;
                    sink(m);
                    if (cfg.eval_every > 0 && (ep + 1) % cfg.eval_every == 0) {
                        for (long e = 0; e < cfg.eval_episodes; ++e) {
                            const SlidingBoard b = FifteenEnv::shuffled_board(mc.n, mc.level, rng);
                            const MiniEpisodeStats es = learner.run_episode(b, rng, false);
                            EpisodeMetrics em;
                            em.episode = ep;
                            em.phase = Phase::Eval;
                            em.steps = es.moves;
                            em.total_reward = es.total_reward;
                            em.outcome = es.outcome;
                            em.lr = mc.alpha;
                            em.game_metric = es.correct_tiles;
                            sink(em);
                        }
                    }
                }
                learner.table().save((out / "checkpoint.qtable").string(), "fifteen-mini");
            } else {
                auto env = make_env(cfg, rng);
                QTable table(env->action_count());
                std::vector<TraceStep> steps;
                for (long ep = 0; ep < cfg.tabular.episodes; ++ep) {
                    steps.clear();
                    const std::uint64_t es = rng.derive();
                    EpisodeMetrics m = tabular_episode(*env, table, cfg.tabular, true, es, rng,
                                                       cfg.trace ? &steps : nullptr);
                    m.episode = ep;
                    sink(m);
                    if (cfg.trace) trace.record(ep, Phase::Train, es, steps);
                    if (cfg.eval_every > 0 && (ep + 1) % cfg.eval_every == 0) {
                        for (long e = 0; e < cfg.eval_episodes; ++e) {
                            steps.clear();
                            const std::uint64_t evs = rng.derive();
                            EpisodeMetrics em = tabular_episode(*env, table, cfg.tabular, false,
                                                                evs, rng,
                                                                cfg.trace ? &steps : nullptr);
                            em.episode = ep;
                            sink(em);
                            if (cfg.trace) trace.record(ep, Phase::Eval, evs, steps);
                        }
                    }
                }
                table.save((out / "checkpoint.qtable").string(), to_string(cfg.game));
            }
            break;
        }
        case Algorithm::DQN: {
            auto env = make_env(cfg, rng);
            const nn::NetworkSpec net = make_network(cfg);
            DQNConfig dc = cfg.dqn;
            dc.eval_every = cfg.eval_every;
            dc.eval_episodes = cfg.eval_episodes;
            const DQNResult res = train_dqn(*env, net, dc, rng, sink);
            nn::save_net_checkpoint((out / "checkpoint.qrlnet").string(), net, res.params,
                                    res.env_steps, rng.state(),
                                    {{"game", to_string(cfg.game)}});
            std::ofstream sc(out / "checkpoint.sidecar.txt");
            sc << "env_steps = " << res.env_steps << '\n';
            sc << "train_steps = " << res.train_steps << '\n';
            sc << "buffer_size = "
               << std::min<std::size_t>(dc.buffer_capacity,
                                        dc.prefill + static_cast<std::size_t>(res.env_steps))
               << '\n';
            sc << "buffer_capacity = " << dc.buffer_capacity << '\n';
            sc << "epsilon_schedule = " << dc.epsilon_schedule.describe() << '\n';
            sc << "epsilon = " << fmt(dc.epsilon_schedule.value(res.env_steps)) << '\n';
            sc << "lr_schedule = " << dc.lr_schedule.describe() << '\n';
            sc << "lr = " << fmt(dc.lr_schedule.value(res.env_steps)) << '\n';
            break;
        }
    }
}

std::string EvalSummary::text() const {
    std::ostringstream ss;
    ss << "game = " << game << '\n';
    ss << "episodes = " << episodes << '\n';
    ss << "win_rate = " << fmt(win_rate) << '\n';
    ss << "mean_reward = " << fmt(mean_reward) << '\n';
    ss << "mean_steps = " << fmt(mean_steps) << '\n';
    for (const auto& [tile, rate] : thresholds)
        ss << "tile_" << tile << " = " << fmt(rate) << '\n';
    return ss.str();
}

namespace {

void finish_summary(EvalSummary& s, const std::vector<EpisodeMetrics>& rows, GameId game) {
    s.episodes = static_cast<long>(rows.size());
    long wins = 0;
    for (const EpisodeMetrics& m : rows) {
        if (m.outcome == Outcome::Win) ++wins;
        s.mean_reward += m.total_reward;
        s.mean_steps += static_cast<double>(m.steps);
    }
    if (!rows.empty()) {
        s.win_rate = static_cast<double>(wins) / static_cast<double>(rows.size());
        s.mean_reward /= static_cast<double>(rows.size());
        s.mean_steps /= static_cast<double>(rows.size());
    }
    if (game == GameId::G2048) {
        for (int tile = 2; tile <= 2048; tile *= 2) {
            long hit = 0;
            for (const EpisodeMetrics& m : rows)
                if (m.game_metric >= static_cast<double>(tile)) ++hit;
            s.thresholds.emplace_back(
                tile, rows.empty() ? 0.0
                                   : static_cast<double>(hit) / static_cast<double>(rows.size()));
        }
    }
}

} // namespace

EvalSummary evaluate_checkpoint(const std::string& checkpoint_path, long episodes,
                                std::uint64_t seed, const std::optional<RunConfig>& cfg) {
    if (episodes <= 0) throw std::invalid_argument("evaluation needs a positive episode count");
    tune_allocator();
    std::ifstream probe(checkpoint_path);
    if (!probe) throw std::runtime_error("cannot open checkpoint: " + checkpoint_path);
    std::string first;
    std::getline(probe, first);
    probe.close();

    Rng rng(seed);
    EvalSummary s;
    std::vector<EpisodeMetrics> rows;

    if (first == "QRLNET1") {
        const nn::NetCheckpoint cp = nn::load_net_checkpoint(checkpoint_path);
        const auto it = cp.meta.find("game");
        if (it == cp.meta.end()) throw std::runtime_error("checkpoint missing game tag");
        const GameId game = game_from_string(it->second);
        RunConfig rc = cfg ? *cfg : default_config(game);
        if (rc.game != game) throw std::invalid_argument("checkpoint/game mismatch");
        const nn::NetworkSpec net = nn::build_network_by_name(cp.name);
        auto env = make_env(rc, rng);
        for (long e = 0; e < episodes; ++e)
            rows.push_back(run_greedy_episode(*env, net, cp.params, rng.derive(),
                                              rc.dqn.max_episode_steps));
        s.game = to_string(game);
        finish_summary(s, rows, game);
        return s;
    }

    if (first.rfind("QTABLE", 0) == 0) {
        std::string game_tag;
        QTable table = QTable::load(checkpoint_path, &game_tag);
        if (game_tag == "fifteen-mini") {
            RunConfig rc = cfg ? *cfg : default_config(GameId::Fifteen);
            if (rc.game != GameId::Fifteen) throw std::invalid_argument("checkpoint/game mismatch");
            MiniEpisodeConfig mc;
            mc.n = rc.board_n;
            mc.level = rc.difficulty;
            mc.overall_move_cap = rc.tabular.move_budget;
            MiniEpisodeLearner learner(mc);
            learner.table() = std::move(table);
            for (long e = 0; e < episodes; ++e) {
                const SlidingBoard b = FifteenEnv::shuffled_board(mc.n, mc.level, rng);
                const MiniEpisodeStats st = learner.run_episode(b, rng, false);
                EpisodeMetrics m;
                m.steps = st.moves;
                m.total_reward = st.total_reward;
                m.outcome = st.outcome;
                rows.push_back(m);
            }
            s.game = "fifteen";
            finish_summary(s, rows, GameId::Fifteen);
            return s;
        }
        const GameId game = game_from_string(game_tag);
        RunConfig rc = cfg ? *cfg : default_config(game);
        if (rc.game != game) throw std::invalid_argument("checkpoint/game mismatch");
        auto env = make_env(rc, rng);
        if (env->action_count() != table.action_count())
            throw std::invalid_argument("checkpoint/game mismatch");
        for (long e = 0; e < episodes; ++e) {
            EpisodeMetrics m =
                tabular_episode(*env, table, rc.tabular, false, rng.derive(), rng, nullptr);
            rows.push_back(m);
        }
        s.game = to_string(game);
        finish_summary(s, rows, game);
        return s;
    }

    throw std::runtime_error("unrecognized checkpoint format: " + checkpoint_path);
}

// ---------------------------------------------------------------------------
// Plots: three stacked panels (loss, smoothed reward, eval win rate) as a
// self-contained SVG. Pure text generation, deterministic for fixed input.

namespace {

struct Panel {
    std::string title;
    std::vector<double> xs, ys;
};

constexpr double kPanelW = 860, kPanelH = 250;
constexpr double kPlotX0 = 80, kPlotX1 = 830, kPlotY0 = 40, kPlotY1 = 220;

void render_panel(std::ostream& out, const Panel& p, double y_offset) {
    out << "<g transform=\"translate(0," << fmt(y_offset) << ")\">\n";
    out << "<text x=\"" << fmt(kPlotX0) << "\" y=\"24\" font-size=\"15\" font-family=\"sans-serif\">"
        << p.title << "</text>\n";
    out << "<line x1=\"" << fmt(kPlotX0) << "\" y1=\"" << fmt(kPlotY1) << "\" x2=\"" << fmt(kPlotX1)
        << "\" y2=\"" << fmt(kPlotY1) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(kPlotX0) << "\" y1=\"" << fmt(kPlotY0) << "\" x2=\"" << fmt(kPlotX0)
        << "\" y2=\"" << fmt(kPlotY1) << "\" stroke=\"black\"/>\n";

    if (p.xs.empty()) {
        out << "<text x=\"" << fmt((kPlotX0 + kPlotX1) / 2) << "\" y=\""
            << fmt((kPlotY0 + kPlotY1) / 2)
            << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">no data</text>\n";
        out << "</g>\n";
        return;
    }

    double xmin = p.xs.front(), xmax = p.xs.front(), ymin = p.ys.front(), ymax = p.ys.front();
    for (double v : p.xs) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : p.ys) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    auto sx = [&](double x) { return kPlotX0 + (x - xmin) / (xmax - xmin) * (kPlotX1 - kPlotX0); };
    auto sy = [&](double y) { return kPlotY1 - (y - ymin) / (ymax - ymin) * (kPlotY1 - kPlotY0); };

    char buf[64];
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        std::snprintf(buf, sizeof buf, "%.6g", xv);
        out << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(kPlotY1 + 18)
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">" << buf
            << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.6g", yv);
        out << "<text x=\"" << fmt(kPlotX0 - 8) << "\" y=\"" << fmt(sy(yv) + 4)
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">" << buf
            << "</text>\n";
    }

    out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < p.xs.size(); ++i) {
        if (i) out << ' ';
        out << fmt(sx(p.xs[i])) << ',' << fmt(sy(p.ys[i]));
    }
    out << "\"/>\n";

    // Raw series values, so the curves can be checked without inverting the
    // pixel transform.
    out << "<!-- series";
    for (std::size_t i = 0; i < p.ys.size(); ++i) out << ' ' << fmt(p.ys[i]);
    out << " -->\n";
    out << "</g>\n";
}

} // namespace

void emit_plots(const std::string& metrics_csv, const std::string& out_path) {
    const std::vector<EpisodeMetrics> rows = read_metrics_csv(metrics_csv);

    Panel loss{"training loss (mean per episode; x = episode)", {}, {}};
    Panel reward{"total reward, window-100 rolling mean (x = episode)", {}, {}};
    Panel winrate{"eval win rate (x = episode of the sweep)", {}, {}};

    std::vector<double> train_rewards;
    for (const EpisodeMetrics& m : rows) {
        if (m.phase != Phase::Train) continue;
        loss.xs.push_back(static_cast<double>(m.episode));
        loss.ys.push_back(m.loss_value);
        reward.xs.push_back(static_cast<double>(m.episode));
        train_rewards.push_back(m.total_reward);
    }
    reward.ys = rolling_mean(train_rewards, 100);

    std::map<long, std::pair<long, long>> sweeps; // episode -> (wins, total)
    for (const EpisodeMetrics& m : rows) {
        if (m.phase != Phase::Eval) continue;
        auto& [wins, total] = sweeps[m.episode];
        if (m.outcome == Outcome::Win) ++wins;
        ++total;
    }
    for (const auto& [ep, wt] : sweeps) {
        winrate.xs.push_back(static_cast<double>(ep));
        winrate.ys.push_back(static_cast<double>(wt.first) / static_cast<double>(wt.second));
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write plot file: " + out_path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kPanelW) << "\" height=\""
        << fmt(3 * kPanelH) << "\" viewBox=\"0 0 " << fmt(kPanelW) << ' ' << fmt(3 * kPanelH)
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    render_panel(out, loss, 0.0);
    render_panel(out, reward, kPanelH);
    render_panel(out, winrate, 2 * kPanelH);
    out << "</svg>\n";
    if (!out) throw std::runtime_error("failed writing plot file: " + out_path);
}

} // namespace qrl
