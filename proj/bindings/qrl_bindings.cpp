#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrl/fifteen.hpp"
#include "qrl/harness.hpp"
#include "qrl/subproblem.hpp"
#include "qrl/sudoku.hpp"

namespace py = pybind11;
using namespace qrl;

namespace {

py::array_t<double> tensor_to_array(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
    py::array_t<double> out(shape);
    std::copy(t.data.begin(), t.data.end(), out.mutable_data());
    return out;
}

const char* terminal_name(Terminal t) {
    switch (t) {
        case Terminal::Ongoing: return "ongoing";
        case Terminal::Win: return "win";
        case Terminal::Loss: return "loss";
    }
    return "ongoing";
}

// Thin env handle sharing the C++ config-file surface.
class PyEnv {
public:
    explicit PyEnv(const std::string& config_text) {
        RunConfig cfg = parse_config_text(config_text);
        Rng rng(cfg.seed);
        env_ = make_env(cfg, rng);
    }

    py::array_t<double> reset(std::uint64_t seed) { return tensor_to_array(env_->reset(seed)); }

    py::tuple step(int action) {
        const StepResult r = env_->step(action);
        py::dict info;
        for (const auto& [k, v] : r.info) info[py::str(k)] = v;
        return py::make_tuple(tensor_to_array(r.observation), r.reward,
                              terminal_name(r.terminal), info);
    }

    std::string state_key() const { return env_->state_key(); }
    int action_count() const { return env_->action_count(); }
    std::string terminal() const { return terminal_name(env_->terminal()); }

private:
    std::unique_ptr<Env> env_;
};

} // namespace

PYBIND11_MODULE(_qrl, m) {
    m.doc() = "Q-learning workbench core";

    py::class_<PyEnv>(m, "Env")
        .def(py::init<const std::string&>(), py::arg("config_text"))
        .def("reset", &PyEnv::reset, py::arg("seed"))
        .def("step", &PyEnv::step, py::arg("action"),
             "Returns (observation, reward, terminal, info).")
        .def("state_key", &PyEnv::state_key)
        .def("action_count", &PyEnv::action_count)
        .def("terminal", &PyEnv::terminal);

    m.def(
        "run_training",
        [](const std::string& config_text, const std::string& out_dir) {
            RunConfig cfg = parse_config_text(config_text);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            run_training(cfg);
            return cfg.out_dir;
        },
        py::arg("config_text"), py::arg("out_dir") = "",
        "Runs a training config; returns the output directory.");

    m.def(
        "evaluate_checkpoint",
        [](const std::string& path, long episodes, std::uint64_t seed) {
            const EvalSummary s = evaluate_checkpoint(path, episodes, seed);
            py::dict d;
            d["game"] = s.game;
            d["episodes"] = s.episodes;
            d["win_rate"] = s.win_rate;
            d["mean_reward"] = s.mean_reward;
            d["mean_steps"] = s.mean_steps;
            py::dict th;
            for (const auto& [tile, rate] : s.thresholds) th[py::int_(tile)] = rate;
            d["thresholds"] = th;
            return d;
        },
        py::arg("checkpoint"), py::arg("episodes") = 100, py::arg("seed") = 1);

    m.def(
        "hierarchical_solve",
        [](const std::string& board_key) -> py::object {
            const SlidingBoard board = SlidingBoard::from_key(board_key);
            const HierarchicalResult res = hierarchical_solve(board);
            if (!res.solved) return py::none();
            py::list moves;
            for (Slide s : res.moves) moves.append(static_cast<int>(s));
            return moves;
        },
        py::arg("board_key"),
        "Moves (0=up, 1=right, 2=down, 3=left) solving the board, or None.");

    m.def(
        "generate_sudoku",
        [](std::uint64_t seed, int givens) {
            Rng rng(seed);
            return generate_sudoku(rng, givens).to_line();
        },
        py::arg("seed"), py::arg("givens"));

    m.def("emit_plots", &emit_plots, py::arg("metrics_csv"), py::arg("out_svg"));

    m.attr("__version__") = "0.1.0";
}
