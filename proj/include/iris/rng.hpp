#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace iris {

/// Counter-free keyed generator: the stream is a pure function of the key
/// chain, so parallel generation order cannot change any value.
class KeyedRng {
public:
    explicit KeyedRng(std::initializer_list<std::uint64_t> keys) {
        state_ = 0x9E3779B97F4A7C15ull;
        for (std::uint64_t k : keys)
            state_ = mix(state_ ^ k);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

    double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal via Box-Muller, two fresh uniforms per call
    double gaussian() {
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace iris
