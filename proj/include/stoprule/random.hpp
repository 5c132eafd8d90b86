#pragma once
// Per-trial random substreams and a parallel trial counter whose result does
// not depend on the number of workers.

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace stoprule {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

/// Engine for trial `index` of a run seeded with `seed`.
inline Engine substream(std::uint64_t seed, std::uint64_t index)
{
    return Engine(splitmix64(splitmix64(seed) ^ index));
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

inline unsigned resolve_workers(unsigned workers)
{
    if (workers != 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `trial(i)` for i in [0, trials) on `workers` threads and accumulates the
/// returned counts; trial i always sees the same inputs regardless of scheduling.
template <class Counts, class TrialFn>
Counts accumulate_trials(std::uint64_t trials, unsigned workers, Counts zero, TrialFn trial)
{
    workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(trials, 1)));
    std::vector<Counts> partial(workers, zero);
    auto run = [&](unsigned w) {
        const std::uint64_t lo = trials * w / workers;
        const std::uint64_t hi = trials * (w + 1) / workers;
        for (std::uint64_t i = lo; i < hi; ++i) trial(i, partial[w]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    Counts total = zero;
    for (const auto& c : partial) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];
    }
    return total;
}

}  // namespace stoprule
