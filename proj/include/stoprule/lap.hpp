#pragma once
// Last-arrival problem in continuous time: an unknown-rate thinned Poisson
// process on [0, T], and the stopping rule k (T - t_k) / t_k <= 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace stoprule {

/// Strictly increasing arrival times in (0, T].
class ArrivalTrace {
public:
    ArrivalTrace(std::vector<double> times, double horizon) : times_(std::move(times)), horizon_(horizon)
    {
        detail::require(horizon_ > 0.0 && std::isfinite(horizon_), "horizon T must be positive");
        for (std::size_t i = 0; i < times_.size(); ++i) {
            detail::require(times_[i] > 0.0 && times_[i] <= horizon_, "arrival times must lie in (0, T]");
            detail::require(i == 0 || times_[i] > times_[i - 1], "arrival times must be strictly increasing");
        }
    }

    const std::vector<double>& times() const { return times_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    /// Number of arrivals in (0, t].
    std::size_t count_until(double t) const
    {
        return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
    }

    ArrivalTrace scaled(double c) const
    {
        std::vector<double> t(times_);
        for (double& x : t) x *= c;
        return ArrivalTrace(std::move(t), horizon_ * c);
    }

private:
    std::vector<double> times_;
    double horizon_;
};

struct LapModel {
    double base_rate = 1.0;  ///< lambda of the unobserved base process
    double thin_p = 1.0;     ///< success probability p in (0, 1]

    void validate() const
    {
        detail::require(base_rate > 0.0 && std::isfinite(base_rate), "base rate must be positive");
        detail::require(thin_p > 0.0 && thin_p <= 1.0, "thinning probability must lie in (0, 1]");
    }
};

inline ArrivalTrace simulate_poisson(double rate, double horizon, Engine& eng)
{
    detail::require(rate > 0.0 && horizon > 0.0, "Poisson simulation needs rate > 0 and T > 0");
    std::poisson_distribution<long long> count(rate * horizon);
    const long long k = count(eng);
    std::vector<double> t(static_cast<std::size_t>(k));
    for (double& x : t) x = horizon * (1.0 - uniform01(eng));  // (0, T]
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return ArrivalTrace(std::move(t), horizon);
}

inline ArrivalTrace simulate_poisson(double rate, double horizon, std::uint64_t seed)
{
    Engine eng = substream(seed, 0);
    return simulate_poisson(rate, horizon, eng);
}

/// Keeps each arrival independently with probability p, preserving order.
inline ArrivalTrace thin(const ArrivalTrace& trace, double p, Engine& eng)
{
    detail::require(p >= 0.0 && p <= 1.0, "thinning probability must lie in [0, 1]");
    std::vector<double> kept;
    kept.reserve(trace.size());
    for (double t : trace.times())
        if (uniform01(eng) < p) kept.push_back(t);
    return ArrivalTrace(std::move(kept), trace.horizon());
}

inline ArrivalTrace thin(const ArrivalTrace& trace, double p, std::uint64_t seed)
{
    Engine eng = substream(seed, 1);
    return thin(trace, p, eng);
}

/// Stop at the k-th arrival at time t_k iff k (T - t_k) / t_k <= 1, evaluated
/// as k (T - t_k) <= t_k. Works for any ordered field (double, rationals).
template <class Num>
bool lap_decide(std::size_t k, const Num& t_k, const Num& horizon)
{
    if (!(t_k > Num(0))) throw DomainError("arrival time must be positive");
    detail::require(k >= 1, "arrival ordinal must be >= 1");
    return Num(static_cast<long long>(k)) * (horizon - t_k) <= t_k;
}

/// The printed ratio form k ((T - t) / t) <= 1.
template <class Num>
bool lap_decide_ratio_form(std::size_t k, const Num& t_k, const Num& horizon)
{
    return Num(static_cast<long long>(k)) * ((horizon - t_k) / t_k) <= Num(1);
}

/// The equivalent time form t_k >= k T / (k + 1).
template <class Num>
bool lap_decide_time_form(std::size_t k, const Num& t_k, const Num& horizon)
{
    const Num kk(static_cast<long long>(k));
    return t_k >= kk * horizon / (kk + Num(1));
}

struct LapOutcome {
    std::optional<std::size_t> stopped;  ///< 1-based arrival ordinal
    bool win = false;
};

/// Scan arrivals, stop at the first k satisfying the rule; win iff that arrival is the last one.
inline LapOutcome lap_play(const ArrivalTrace& trace)
{
    LapOutcome out;
    const auto& t = trace.times();
    for (std::size_t k = 1; k <= t.size(); ++k) {
        if (lap_decide(k, t[k - 1], trace.horizon())) {
            out.stopped = k;
            out.win = k == t.size();
            return out;
        }
    }
    return out;
}

/// One simulated play: base process, thinning, rule on the thinned trace only.
inline bool lap_trial(const LapModel& model, double horizon, Engine& eng)
{
    const ArrivalTrace base = simulate_poisson(model.base_rate, horizon, eng);
    return lap_play(thin(base, model.thin_p, eng)).win;
}

inline SimulationReport lap_win_estimate(const LapModel& model, double horizon, std::uint64_t trials,
                                         std::uint64_t seed, unsigned workers = 1)
{
    model.validate();
    detail::require(trials >= 1, "need at least one trial");
    detail::require(horizon > 0.0, "horizon T must be positive");
    using Counts = std::array<std::uint64_t, 1>;
    const Counts wins = accumulate_trials(trials, workers, Counts{0}, [&](std::uint64_t i, Counts& c) {
        Engine eng = substream(seed, i);
        c[0] += lap_trial(model, horizon, eng) ? 1 : 0;
    });
    return make_report(wins[0], trials, seed);
}

/// Statistical check of E[N~_t / t] = p lambda across a time grid.
struct MartingaleReport {
    std::vector<double> grid;
    std::vector<double> mean;                ///< E[N~_t / t]
    std::vector<double> std_error;
    std::vector<double> z_score;             ///< (mean - p lambda) / std_error
    std::vector<double> conditional_mean;    ///< E[N~_t / t | first jump <= t], informational
    double expected = 0.0;                   ///< p lambda
    double max_pairwise_deviation = 0.0;     ///< max |mean_i - mean_j|
    double max_pairwise_z = 0.0;             ///< same, in units of the paired-difference std error
    std::vector<std::size_t> violations_4sigma;  ///< grid indices with |z| > 4
    bool passed_3sigma = true;
};

inline MartingaleReport pi_martingale_check(const LapModel& model, std::vector<double> grid, std::uint64_t trials,
                                            std::uint64_t seed)
{
    model.validate();
    detail::require(!grid.empty(), "grid needs at least one time point");
    detail::require(trials >= 2, "need at least two trials");
    for (double t : grid) detail::require(t > 0.0, "grid points must be positive");

    const std::size_t G = grid.size();
    const double horizon = *std::max_element(grid.begin(), grid.end());
    std::vector<double> sum(G, 0.0), sum_sq(G, 0.0), cond_sum(G, 0.0), diff_sq(G * G, 0.0);
    std::vector<std::uint64_t> cond_count(G, 0);
    std::vector<double> v(G);

    for (std::uint64_t i = 0; i < trials; ++i) {
        Engine eng = substream(seed, i);
        const ArrivalTrace obs = thin(simulate_poisson(model.base_rate, horizon, eng), model.thin_p, eng);
        for (std::size_t g = 0; g < G; ++g) {
            const std::size_t cnt = obs.count_until(grid[g]);
            v[g] = static_cast<double>(cnt) / grid[g];
            sum[g] += v[g];
            sum_sq[g] += v[g] * v[g];
            if (cnt > 0) {
                cond_sum[g] += v[g];
                ++cond_count[g];
            }
        }
        for (std::size_t a = 0; a < G; ++a)
            for (std::size_t b = a + 1; b < G; ++b) diff_sq[a * G + b] += (v[a] - v[b]) * (v[a] - v[b]);
    }

    MartingaleReport rep;
    rep.grid = grid;
    rep.expected = model.thin_p * model.base_rate;
    const double n = static_cast<double>(trials);
    for (std::size_t g = 0; g < G; ++g) {
        const double mean = sum[g] / n;
        const double var = std::max(0.0, (sum_sq[g] - n * mean * mean) / (n - 1.0));
        const double se = std::sqrt(var / n);
        rep.mean.push_back(mean);
        rep.std_error.push_back(se);
        const double z = se > 0.0 ? (mean - rep.expected) / se : (mean == rep.expected ? 0.0 : INFINITY);
        rep.z_score.push_back(z);
        rep.conditional_mean.push_back(cond_count[g] ? cond_sum[g] / static_cast<double>(cond_count[g]) : 0.0);
        if (std::abs(z) > 4.0) rep.violations_4sigma.push_back(g);
        if (std::abs(z) > 3.0) rep.passed_3sigma = false;
    }
    for (std::size_t a = 0; a < G; ++a) {
        for (std::size_t b = a + 1; b < G; ++b) {
            const double d = rep.mean[a] - rep.mean[b];
            const double var = std::max(0.0, (diff_sq[a * G + b] - n * d * d) / (n - 1.0));
            const double se = std::sqrt(var / n);
            rep.max_pairwise_deviation = std::max(rep.max_pairwise_deviation, std::abs(d));
            if (se > 0.0) rep.max_pairwise_z = std::max(rep.max_pairwise_z, std::abs(d) / se);
        }
    }
    return rep;
}

}  // namespace stoprule
