#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace stoprule {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Binomial win-rate estimate from Monte Carlo trials.
struct SimulationReport {
    double estimate = 0.0;
    double std_error = 0.0;  ///< sqrt(estimate (1 - estimate) / trials)
    Interval ci95;           ///< Wilson score interval
    std::uint64_t trials = 0;
    std::uint64_t wins = 0;
    std::uint64_t seed = 0;

    bool operator==(const SimulationReport&) const = default;
};

inline constexpr double kZ95 = 1.959963984540054;

inline Interval wilson_interval(std::uint64_t wins, std::uint64_t trials, double z = kZ95)
{
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(wins) / n;
    const double z2 = z * z;
    const double centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline SimulationReport make_report(std::uint64_t wins, std::uint64_t trials, std::uint64_t seed)
{
    SimulationReport rep;
    rep.trials = trials;
    rep.wins = wins;
    rep.seed = seed;
    rep.estimate = trials ? static_cast<double>(wins) / static_cast<double>(trials) : 0.0;
    rep.std_error = trials ? std::sqrt(rep.estimate * (1.0 - rep.estimate) / static_cast<double>(trials)) : 0.0;
    rep.ci95 = wilson_interval(wins, trials);
    return rep;
}

/// sqrt(se_a^2 + se_b^2), for comparing independent estimates.
inline double joint_std_error(const SimulationReport& a, const SimulationReport& b)
{
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

}  // namespace stoprule
