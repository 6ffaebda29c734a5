// Internal helpers shared by the orbit-sampling estimators: compensated
// summation, a deterministic index-parallel driver, and the per-step orbit
// dither that keeps exactly-binary maps off their dyadic lattices.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "srblab/geometry.hpp"
#include "srblab/measures.hpp"
#include "srblab/rng.hpp"

namespace srblab::detail {

struct CompensatedSum {
    double s = 0.0;
    double c = 0.0;

    void add(double v) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }

    double value() const { return s; }
};

// Runs work(0..count-1) on the given number of threads. Work items write
// disjoint slots, so any schedule produces identical results; the first
// captured exception (by thread index) is rethrown after the join.
inline void parallel_indices(long count, int threads, const std::function<void(long)>& work) {
    const int t_use = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
    if (t_use == 1) {
        for (long i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::exception_ptr> errs(t_use);
    std::vector<std::thread> pool;
    pool.reserve(t_use);
    for (int t = 0; t < t_use; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (long i; (i = next.fetch_add(1)) < count;) work(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

inline Point2 dithered(Point2 z, const CounterRng& rng, std::uint64_t orbit, std::uint64_t step) {
    z.x += (rng.uniform(2 * orbit, step) - 0.5) * kOrbitDither;
    z.y += (rng.uniform(2 * orbit + 1, step) - 0.5) * kOrbitDither;
    z.x = std::min(std::max(z.x, 0.0), 1.0);
    z.y = std::min(std::max(z.y, 0.0), 1.0);
    return z;
}

}  // namespace srblab::detail
