#pragma once
// Reproducible Monte Carlo over Bernoulli and Markov models. Trial i draws all
// of its randomness from substream(seed, i), so reports are bit-identical for
// any worker count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "markov.hpp"
#include "odds.hpp"
#include "policy.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace stoprule {

using AnyPolicy = std::variant<StoppingPolicy, AdaptivePolicy>;

inline std::size_t policy_horizon(const AnyPolicy& pol)
{
    return std::visit([](const auto& p) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, StoppingPolicy>) return p.horizon();
        else return p.n;
    }, pol);
}

inline void draw_outcomes(const OddsSequence& seq, Engine& eng, std::vector<std::uint8_t>& x)
{
    x.resize(seq.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = uniform01(eng) < seq.probs()[i] ? 1 : 0;
}

/// Policies evaluated on common random numbers: every policy sees the same outcome vector in trial i.
inline std::vector<SimulationReport> compare(const std::vector<AnyPolicy>& policies, const OddsSequence& seq,
                                             const Objective& obj, std::uint64_t trials, std::uint64_t seed,
                                             unsigned workers = 1)
{
    detail::require(trials >= 1, "need at least one trial");
    obj.validate(seq.size());
    for (const auto& pol : policies) {
        detail::require(policy_horizon(pol) == seq.size(), "policy horizon differs from the model");
        if (obj.kind == ObjectiveKind::multi_select)
            detail::require(std::holds_alternative<StoppingPolicy>(pol), "multi-select needs a deterministic multi-stop policy");
    }
    const std::vector<std::uint64_t> zero(policies.size(), 0);
    const auto wins = accumulate_trials(trials, workers, zero, [&](std::uint64_t i, std::vector<std::uint64_t>& c) {
        thread_local std::vector<std::uint8_t> x;
        Engine eng = substream(seed, i);
        draw_outcomes(seq, eng, x);
        for (std::size_t k = 0; k < policies.size(); ++k) {
            const bool won = std::visit([&](const auto& p) { return play(x, p, obj); }, policies[k]);
            c[k] += won ? 1 : 0;
        }
    });
    std::vector<SimulationReport> out;
    for (std::uint64_t w : wins) out.push_back(make_report(w, trials, seed));
    return out;
}

inline SimulationReport simulate(const OddsSequence& seq, const AnyPolicy& policy, const Objective& obj,
                                 std::uint64_t trials, std::uint64_t seed, unsigned workers = 1)
{
    return compare({policy}, seq, obj, trials, seed, workers).front();
}

/// Backward-indexed chain under a phi-policy, objective last success.
inline SimulationReport simulate(const MarkovSpec& spec, const MarkovPolicy& policy, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers = 1)
{
    detail::require(trials >= 1, "need at least one trial");
    detail::require(policy.N() == spec.N(), "policy and chain horizons differ");
    using Counts = std::array<std::uint64_t, 1>;
    const Counts wins = accumulate_trials(trials, workers, Counts{0}, [&](std::uint64_t i, Counts& c) {
        Engine eng = substream(seed, i);
        bool state = uniform01(eng) < spec.rho();
        bool stopped = false;
        bool stopped_is_last = false;
        for (std::size_t j = spec.N();; --j) {
            if (stopped && state) stopped_is_last = false;
            if (!stopped && state && policy.stops(j)) {
                stopped = true;
                stopped_is_last = true;
            }
            if (j == 0) break;
            const double u = uniform01(eng);
            state = state ? (u >= spec.beta(j)) : (u < spec.alpha(j));
        }
        c[0] += stopped && stopped_is_last ? 1 : 0;
    });
    return make_report(wins[0], trials, seed);
}

/// Plug-in rule for an unknown common success probability: estimate
///   p_hat_k = (1 + successes among x_1..x_{k-1}) / ((k - 1) + 2)
/// and stop at a success at k when k lies in the sum-the-odds window of a
/// constant-p_hat sequence over the remaining indices k..n.
class EmpiricalOddsPolicy {
public:
    explicit EmpiricalOddsPolicy(std::size_t n) : n_(n) { detail::require(n >= 1, "horizon must be >= 1"); }

    std::size_t horizon() const { return n_; }

    double estimate(std::size_t k, std::span<const std::uint8_t> history) const
    {
        detail::require(k >= 1 && k <= n_ && history.size() >= k - 1, "history shorter than k - 1");
        std::size_t successes = 0;
        for (std::size_t i = 0; i + 1 < k; ++i) successes += history[i];
        return (1.0 + static_cast<double>(successes)) / (static_cast<double>(k - 1) + 2.0);
    }

    /// First index of the recomputed window, as an absolute index in [k, n].
    std::size_t window_start(std::size_t k, std::span<const std::uint8_t> history) const
    {
        const double p_hat = estimate(k, history);
        const OddsSequence rest(std::vector<double>(n_ - k + 1, p_hat));
        return k - 1 + threshold(rest).s;
    }

    bool stop_at_success(std::size_t k, std::span<const std::uint8_t> history) const
    {
        return window_start(k, history) == k;
    }

    AdaptivePolicy as_adaptive() const
    {
        return AdaptivePolicy{n_, [self = *this](std::size_t k, std::span<const std::uint8_t> h) {
                                  return self.stop_at_success(k, h);
                              }};
    }

private:
    std::size_t n_;
};

inline AdaptivePolicy empirical_odds_policy(std::size_t n) { return EmpiricalOddsPolicy(n).as_adaptive(); }

}  // namespace stoprule
