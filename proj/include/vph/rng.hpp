#pragma once
#include <cstdint>

namespace vph {

// Counter-based generator (SplitMix64 output function). The i-th draw for a
// given seed is mix(seed + (i+1)*0x9E3779B97F4A7C15); streams are therefore
// reproducible across platforms and random-access by index. This generator is
// part of the file-format/config contract: any reimplementation must produce
// identical streams.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    explicit CounterRng(std::uint64_t s = 0) : seed(s) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return at(counter++); }

    // draw i of the stream, independent of the cursor
    std::uint64_t at(std::uint64_t i) const {
        return mix(seed + (i + 1) * 0x9E3779B97F4A7C15ull);
    }

    // uniform in [0,1) from the top 53 bits
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [a,b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // symmetric uniform in [-a,a)
    double sym(double a) { return uniform(-a, a); }
};

} // namespace vph
