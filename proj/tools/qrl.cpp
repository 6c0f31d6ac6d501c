#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrl/harness.hpp"
#include "qrl/subproblem.hpp"
#include "qrl/sudoku.hpp"

namespace {

qrl::SlidingBoard parse_board(const std::string& text) {
    std::vector<int> cells;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) cells.push_back(std::stoi(tok));
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells.size()))));
    if (n < 2 || n * n != static_cast<int>(cells.size()))
        throw std::invalid_argument("board must list a square number of cells (e.g. 16 values)");
    qrl::SlidingBoard b;
    b.n = n;
    b.cells = std::move(cells);
    // from_key round-trip validates the permutation
    return qrl::SlidingBoard::from_key(b.key());
}

char slide_letter(qrl::Slide s) {
    switch (s) {
        case qrl::Slide::Up: return 'U';
        case qrl::Slide::Right: return 'R';
        case qrl::Slide::Down: return 'D';
        case qrl::Slide::Left: return 'L';
    }
    return '?';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qrl: constraint-game reinforcement-learning workbench"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "run a configured training job");
    std::string train_config, train_out;
    std::uint64_t train_seed = 0;
    bool train_seed_set = false, train_out_set = false;
    train->add_option("--config", train_config, "run config file")->required();
    train->add_option("--seed", train_seed, "override the config seed")
        ->each([&](const std::string&) { train_seed_set = true; });
    train->add_option("--out", train_out, "override the output directory")
        ->each([&](const std::string&) { train_out_set = true; });

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with the greedy policy");
    std::string eval_checkpoint, eval_config;
    long eval_episodes = 0;
    std::uint64_t eval_seed = 1;
    eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")->required();
    eval->add_option("--episodes", eval_episodes, "episode count")->required();
    eval->add_option("--seed", eval_seed, "evaluation seed")->required();
    eval->add_option("--config", eval_config, "optional run config for the environment");

    // solve15
    auto* solve15 = app.add_subcommand("solve15", "solve a sliding puzzle board exactly");
    std::string solve_board;
    solve15->add_option("--board", solve_board, "comma-separated cells, 0 = blank")->required();

    // gen-sudoku
    auto* gen = app.add_subcommand("gen-sudoku", "generate unique-solution sudoku puzzles");
    std::string gen_difficulty = "easy", gen_out;
    int gen_count = 1, gen_givens = 0;
    std::uint64_t gen_seed = 1;
    gen->add_option("--difficulty", gen_difficulty, "easy|medium|hard")->required();
    gen->add_option("--count", gen_count, "number of puzzles")->required();
    gen->add_option("--out", gen_out, "output file, one puzzle per line")->required();
    gen->add_option("--givens", gen_givens, "givens per puzzle (default by difficulty)");
    gen->add_option("--seed", gen_seed, "generator seed");

    // plot
    auto* plot = app.add_subcommand("plot", "render learning curves from metrics.csv");
    std::string plot_metrics, plot_out;
    plot->add_option("--metrics", plot_metrics, "metrics.csv path")->required();
    plot->add_option("--out", plot_out, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train) {
            qrl::RunConfig cfg = qrl::load_config(train_config);
            if (train_seed_set) cfg.seed = train_seed;
            if (train_out_set) cfg.out_dir = train_out;
            qrl::run_training(cfg);
            std::cout << "run complete: " << cfg.out_dir << "\n";
        } else if (*eval) {
            std::optional<qrl::RunConfig> cfg;
            if (!eval_config.empty()) cfg = qrl::load_config(eval_config);
            const qrl::EvalSummary s =
                qrl::evaluate_checkpoint(eval_checkpoint, eval_episodes, eval_seed, cfg);
            std::cout << s.text();
        } else if (*solve15) {
            const qrl::SlidingBoard board = parse_board(solve_board);
            const qrl::HierarchicalResult res = qrl::hierarchical_solve(board);
            if (!res.solved) throw std::runtime_error("solver failed on the given board");
            std::cout << "moves = ";
            for (qrl::Slide s : res.moves) std::cout << slide_letter(s);
            std::cout << "\ncount = " << res.moves.size() << "\n";
        } else if (*gen) {
            const auto level = qrl::level_from_string(gen_difficulty);
            if (gen_count <= 0) throw std::invalid_argument("--count must be positive");
            const int givens = gen_givens > 0 ? gen_givens
                               : level == qrl::DifficultyClass::Level::Easy   ? 40
                               : level == qrl::DifficultyClass::Level::Medium ? 30
                                                                              : 25;
            std::ofstream out(gen_out);
            if (!out) throw std::runtime_error("cannot write " + gen_out);
            qrl::Rng rng(gen_seed);
            for (int i = 0; i < gen_count; ++i)
                out << qrl::generate_sudoku(rng, givens, level).to_line() << "\n";
            std::cout << "wrote " << gen_count << " puzzles to " << gen_out << "\n";
        } else if (*plot) {
            qrl::emit_plots(plot_metrics, plot_out);
            std::cout << "wrote " << plot_out << "\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
