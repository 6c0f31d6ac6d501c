#pragma once

#include <string>

namespace qrl::nn {

// Piecewise learning-rate / epsilon schedules over environment-step counts.
// value(step) is clamped at the terminal value past the horizon and is
// guaranteed positive whenever the defining parameters are positive.
struct Schedule {
    enum class Kind { Constant, StepDrops, ExponentialStaircase, LinearAnneal, MultiplicativeEveryK };

    Kind kind = Kind::Constant;
    double base = 1.0;

    // step-drops: base until drop1, base/10 until drop2, base/50 after.
    long drop1 = 0;
    long drop2 = 0;

    // linear-anneal: base -> final over `horizon` steps, then flat.
    double final_value = 0.0;
    long horizon = 0;

    // staircase / multiplicative-every-k: base * factor^(step / every).
    double factor = 1.0;
    long every = 1;

    double value(long step) const;
    std::string describe() const;

    static Schedule constant(double rate);
    static Schedule step_drops(double base, long drop1, long drop2);
    static Schedule linear_anneal(double from, double to, long horizon);
    static Schedule exponential_staircase(double base, double factor, long every);
    static Schedule multiplicative_every_k(double base, double factor, long every);

    // Inverse of describe(), for config files and checkpoint sidecars.
    static Schedule parse(const std::string& text);
};

} // namespace qrl::nn
