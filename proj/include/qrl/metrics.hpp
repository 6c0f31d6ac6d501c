#pragma once

#include <functional>
#include <string>

namespace qrl {

enum class Phase { Train, Eval };
enum class Outcome { Win, Loss, Timeout };

const char* to_string(Phase p);
const char* to_string(Outcome o);

// One row of metrics.csv. total_reward is the plain sum of step rewards
// of the episode; game_metric is the game-specific progress figure
// (correct tiles, revealed fraction, max tile, filled cells).
struct EpisodeMetrics {
    long episode = 0;
    Phase phase = Phase::Train;
    long steps = 0;
    double total_reward = 0.0;
    Outcome outcome = Outcome::Loss;
    double loss_value = 0.0; // mean training loss since the last record
    double epsilon = 0.0;
    double lr = 0.0;
    double game_metric = 0.0;
    double wall_ms = 0.0;
};

using MetricsSink = std::function<void(const EpisodeMetrics&)>;

} // namespace qrl
