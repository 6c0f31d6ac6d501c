#include "qrl/nn/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qrl::nn {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

} // namespace

double Schedule::value(long step) const {
    if (step < 0) throw std::invalid_argument("schedule step must be non-negative");
    switch (kind) {
        case Kind::Constant:
            return base;
        case Kind::StepDrops:
            if (step < drop1) return base;
            if (step < drop2) return base / 10.0;
            return base / 50.0;
        case Kind::LinearAnneal: {
            if (step >= horizon) return final_value;
            const double t = static_cast<double>(step) / static_cast<double>(horizon);
            return base + (final_value - base) * t;
        }
        case Kind::ExponentialStaircase:
        case Kind::MultiplicativeEveryK:
            return base * std::pow(factor, static_cast<double>(step / every));
    }
    throw std::logic_error("unreachable schedule kind");
}

Schedule Schedule::constant(double rate) {
    if (rate <= 0.0) throw std::invalid_argument("constant schedule rate must be positive");
    Schedule s;
    s.kind = Kind::Constant;
    s.base = rate;
    return s;
}

Schedule Schedule::step_drops(double base, long drop1, long drop2) {
    if (base <= 0.0) throw std::invalid_argument("step-drops base must be positive");
    if (drop1 <= 0 || drop2 <= drop1) throw std::invalid_argument("step-drops breakpoints must increase");
    Schedule s;
    s.kind = Kind::StepDrops;
    s.base = base;
    s.drop1 = drop1;
    s.drop2 = drop2;
    return s;
}

Schedule Schedule::linear_anneal(double from, double to, long horizon) {
    if (from <= 0.0 || to <= 0.0) throw std::invalid_argument("linear-anneal endpoints must be positive");
    if (horizon <= 0) throw std::invalid_argument("linear-anneal horizon must be positive");
    Schedule s;
    s.kind = Kind::LinearAnneal;
    s.base = from;
    s.final_value = to;
    s.horizon = horizon;
    return s;
}

namespace {

Schedule geometric(Schedule::Kind kind, double base, double factor, long every) {
    if (base <= 0.0 || factor <= 0.0) throw std::invalid_argument("geometric schedule needs positive base/factor");
    if (every <= 0) throw std::invalid_argument("geometric schedule period must be positive");
    Schedule s;
    s.kind = kind;
    s.base = base;
    s.factor = factor;
    s.every = every;
    return s;
}

} // namespace

Schedule Schedule::exponential_staircase(double base, double factor, long every) {
    return geometric(Kind::ExponentialStaircase, base, factor, every);
}

Schedule Schedule::multiplicative_every_k(double base, double factor, long every) {
    return geometric(Kind::MultiplicativeEveryK, base, factor, every);
}

std::string Schedule::describe() const {
    std::ostringstream ss;
    ss.precision(17);
    switch (kind) {
        case Kind::Constant: ss << "constant:" << base; break;
        case Kind::StepDrops: ss << "step-drops:" << base << ':' << drop1 << ':' << drop2; break;
        case Kind::LinearAnneal: ss << "linear-anneal:" << base << ':' << final_value << ':' << horizon; break;
        case Kind::ExponentialStaircase: ss << "exponential-staircase:" << base << ':' << factor << ':' << every; break;
        case Kind::MultiplicativeEveryK: ss << "multiplicative-every-k:" << base << ':' << factor << ':' << every; break;
    }
    return ss.str();
}

Schedule Schedule::parse(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.empty()) throw std::invalid_argument("empty schedule spec");
    const std::string& k = parts[0];
    try {
        if (k == "constant" && parts.size() == 2) return constant(std::stod(parts[1]));
        if (k == "step-drops" && parts.size() == 4)
            return step_drops(std::stod(parts[1]), std::stol(parts[2]), std::stol(parts[3]));
        if (k == "linear-anneal" && parts.size() == 4)
            return linear_anneal(std::stod(parts[1]), std::stod(parts[2]), std::stol(parts[3]));
        if (k == "exponential-staircase" && parts.size() == 4)
            return exponential_staircase(std::stod(parts[1]), std::stod(parts[2]), std::stol(parts[3]));
        if (k == "multiplicative-every-k" && parts.size() == 4)
            return multiplicative_every_k(std::stod(parts[1]), std::stod(parts[2]), std::stol(parts[3]));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad schedule spec: " + text);
    }
    throw std::invalid_argument("bad schedule spec: " + text);
}

} // namespace qrl::nn
