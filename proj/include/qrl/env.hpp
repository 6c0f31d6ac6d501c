#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrl/tensor.hpp"

namespace qrl {

enum class GameId { Fifteen, Minesweeper, G2048, Sudoku };
enum class Terminal { Ongoing, Win, Loss };
enum class Encoding { OneHot, Condensed, Image };

const char* to_string(GameId g);
const char* to_string(Terminal t);
const char* to_string(Encoding e);
GameId game_from_string(const std::string& s);
Encoding encoding_from_string(const std::string& s);

struct StepResult {
    Tensor observation;
    double reward = 0.0;
    Terminal terminal = Terminal::Ongoing;
    std::map<std::string, double> info;
};

// Difficulty classification. `parameter` is the game's difficulty measure:
// shuffle distance (fifteen), mine density (minesweeper), guess count (sudoku).
struct DifficultyClass {
    enum class Level { Easy, Medium, Hard };
    GameId game;
    Level level;
    double parameter = 0.0;

    static Level fifteen_level(int distance) {
        if (distance < 10) return Level::Easy;
        if (distance < 30) return Level::Medium;
        return Level::Hard;
    }
    static Level minesweeper_level(double density) {
        if (density < 0.35) return Level::Easy;
        if (density < 0.70) return Level::Medium;
        return Level::Hard;
    }
    static Level sudoku_level(int guesses) {
        if (guesses < 3) return Level::Easy;
        if (guesses < 6) return Level::Medium;
        return Level::Hard;
    }
};

const char* to_string(DifficultyClass::Level l);
DifficultyClass::Level level_from_string(const std::string& s);

// Uniform environment contract. An instance is owned by one execution
// context; cross-run parallelism uses independent instances with
// independent seeds.
class Env {
public:
    virtual ~Env() = default;

    virtual GameId game() const = 0;
    virtual int action_count() const = 0;
    virtual std::array<int, 3> observation_shape() const = 0;

    virtual Tensor reset(std::uint64_t seed) = 0;
    virtual StepResult step(int action) = 0;

    virtual Terminal terminal() const = 0;
    // Canonical state key for tabular learners and conformance fixtures.
    virtual std::string state_key() const = 0;

    // Compact byte encoding of the current visible state, decodable by
    // decode_observation. Used by the replay buffer to avoid storing
    // full one-hot tensors.
    virtual std::vector<std::uint8_t> compact_state() const = 0;
    virtual Tensor decode_observation(const std::vector<std::uint8_t>& compact) const = 0;

    Tensor observation() const { return decode_observation(compact_state()); }

protected:
    void require_ongoing() const {
        if (terminal() != Terminal::Ongoing)
            throw std::logic_error("step after terminal state; reset required");
    }
};

} // namespace qrl
