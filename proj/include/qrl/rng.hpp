#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qrl {

// Deterministic RNG wrapper. All sampling goes through the helpers below so
// results do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1) with 53 bits of entropy.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Derive an independent stream (e.g. per-episode seeds).
    std::uint64_t derive() { return gen_(); }

    // Full engine state as text, for resumable checkpoints.
    std::string state() const {
        std::ostringstream ss;
        ss << gen_;
        return ss.str();
    }

    void set_state(const std::string& s) {
        std::istringstream ss(s);
        ss >> gen_;
        if (!ss) throw std::invalid_argument("bad rng state string");
    }

private:
    std::mt19937_64 gen_;
};

} // namespace qrl
