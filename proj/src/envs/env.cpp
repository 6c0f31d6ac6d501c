#include "qrl/env.hpp"

namespace qrl {

const char* to_string(GameId g) {
    switch (g) {
        case GameId::Fifteen: return "fifteen";
        case GameId::Minesweeper: return "minesweeper";
        case GameId::G2048: return "2048";
        case GameId::Sudoku: return "sudoku";
    }
    return "?";
}

const char* to_string(Terminal t) {
    switch (t) {
        case Terminal::Ongoing: return "ongoing";
        case Terminal::Win: return "win";
        case Terminal::Loss: return "loss";
    }
    return "?";
}

const char* to_string(Encoding e) {
    switch (e) {
        case Encoding::OneHot: return "one_hot";
        case Encoding::Condensed: return "condensed";
        case Encoding::Image: return "image";
    }
    return "?";
}

GameId game_from_string(const std::string& s) {
    if (s == "fifteen" || s == "15" || s == "15-puzzle") return GameId::Fifteen;
    if (s == "minesweeper") return GameId::Minesweeper;
    if (s == "2048" || s == "g2048") return GameId::G2048;
    if (s == "sudoku") return GameId::Sudoku;
    throw std::invalid_argument("unknown game id: " + s);
}

Encoding encoding_from_string(const std::string& s) {
    if (s == "one_hot") return Encoding::OneHot;
    if (s == "condensed") return Encoding::Condensed;
    if (s == "image") return Encoding::Image;
    throw std::invalid_argument("unknown encoding: " + s);
}

const char* to_string(DifficultyClass::Level l) {
    switch (l) {
        case DifficultyClass::Level::Easy: return "easy";
        case DifficultyClass::Level::Medium: return "medium";
        case DifficultyClass::Level::Hard: return "hard";
    }
    return "?";
}

DifficultyClass::Level level_from_string(const std::string& s) {
    if (s == "easy" || s == "low") return DifficultyClass::Level::Easy;
    if (s == "medium") return DifficultyClass::Level::Medium;
    if (s == "hard" || s == "high") return DifficultyClass::Level::Hard;
    throw std::invalid_argument("unknown difficulty: " + s);
}

} // namespace qrl
