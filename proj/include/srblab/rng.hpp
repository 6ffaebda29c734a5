// Counter-based pseudo-random numbers. Every draw is a pure function of
// (seed, stream, counter), so runs are reproducible regardless of evaluation
// order or thread count. The mixer is the splitmix64 finalizer applied to a
// Weyl-combined key; statistically solid for sampling seeds and test points.
#pragma once

#include <cstdint>

namespace srblab {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t raw(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t z = seed_;
        z = mix(z + 0x9e3779b97f4a7c15ULL * (stream + 1));
        z = mix(z + 0x9e3779b97f4a7c15ULL * (counter + 1));
        return mix(z);
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(raw(stream, counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in (lo, hi), never exactly an endpoint.
    double open(std::uint64_t stream, std::uint64_t counter, double lo,
                double hi) const {
        const double u =
            (static_cast<double>(raw(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

} // namespace srblab
