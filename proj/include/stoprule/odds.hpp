#pragma once
// Independent-indicator odds model and the sum-the-odds threshold rule.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace stoprule {

/// Comparisons of accumulated sums against their critical constant (1 for odds
/// sums, 0 for H-values) treat anything within this band as an exact tie.
inline constexpr double kTieTolerance = 1e-12;

/// Odds r = p/q of a single indicator. p = 1 yields the explicit infinite marker.
class Odds {
public:
    static Odds from_probability(double p)
    {
        if (p >= 1.0) return Odds{0.0, true};
        return Odds{p / (1.0 - p), false};
    }

    bool infinite() const { return infinite_; }
    /// Finite value; meaningless when infinite().
    double value() const { return value_; }

private:
    Odds(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

/// Success probabilities p_1..p_n of independent indicators (stored 0-based).
class OddsSequence {
public:
    OddsSequence() = default;

    explicit OddsSequence(std::vector<double> probs) : probs_(std::move(probs))
    {
        detail::require(!probs_.empty(), "odds sequence must have n >= 1");
        for (double p : probs_) {
            detail::require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
                            "success probabilities must lie in [0, 1]");
        }
    }

    std::size_t size() const { return probs_.size(); }
    std::span<const double> probs() const { return probs_; }

    /// 1-based accessors, matching the index convention of the rules.
    double p(std::size_t i) const { return probs_.at(i - 1); }
    double q(std::size_t i) const { return 1.0 - probs_.at(i - 1); }
    Odds odds(std::size_t i) const { return Odds::from_probability(p(i)); }

    bool has_infinite_odds() const
    {
        for (double p : probs_)
            if (p >= 1.0) return true;
        return false;
    }

    bool operator==(const OddsSequence&) const = default;

private:
    std::vector<double> probs_;
};

/// Stop on the first success at index >= s.
struct ThresholdRule {
    std::size_t s = 1;
    bool operator==(const ThresholdRule&) const = default;
};

struct WinProb {
    double value = 0.0;
};

/// Threshold together with bookkeeping of the backward scan.
struct ThresholdScan {
    ThresholdRule rule;
    std::size_t evaluations = 0;  ///< odds terms visited
    bool reached_one = false;     ///< sum_{j=s}^n r_j >= 1 was observed
};

/// One backward pass r_n + r_{n-1} + ... stopping as soon as the sum reaches 1.
inline ThresholdScan threshold_scan(const OddsSequence& seq)
{
    detail::require(seq.size() >= 1, "empty odds sequence");
    ThresholdScan scan;
    double sum = 0.0;
    for (std::size_t k = seq.size(); k >= 1; --k) {
        ++scan.evaluations;
        const Odds r = seq.odds(k);
        if (r.infinite() || (sum += r.value()) >= 1.0 - kTieTolerance) {
            scan.rule.s = k;
            scan.reached_one = true;
            return scan;
        }
    }
    scan.rule.s = 1;
    return scan;
}

inline ThresholdRule threshold(const OddsSequence& seq) { return threshold_scan(seq).rule; }

/// Sum of finite odds over [from, n]; infinite if any p_i = 1 in range.
inline double tail_odds_sum(const OddsSequence& seq, std::size_t from)
{
    double sum = 0.0;
    for (std::size_t k = from; k <= seq.size(); ++k) {
        const Odds r = seq.odds(k);
        if (r.infinite()) return INFINITY;
        sum += r.value();
    }
    return sum;
}

/// P(exactly one success in [s, n]), via prefix/suffix products of q.
inline WinProb win_probability(const OddsSequence& seq, ThresholdRule rule)
{
    const std::size_t n = seq.size();
    detail::require(rule.s >= 1 && rule.s <= n, "threshold outside [1, n]");
    const std::size_t len = n - rule.s + 1;
    std::vector<double> suffix(len + 1, 1.0);
    for (std::size_t t = len; t-- > 0;) suffix[t] = suffix[t + 1] * seq.q(rule.s + t);
    double prefix = 1.0;
    double total = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        const std::size_t j = rule.s + t;
        total += seq.p(j) * prefix * suffix[t + 1];
        prefix *= seq.q(j);
    }
    return WinProb{total};
}

struct OneOverEReport {
    bool applicable = false;  ///< sum of all odds >= 1
    double value = 0.0;       ///< V(n) of the optimal threshold
    double margin = 0.0;      ///< V(n) - 1/e when applicable
};

/// Lower bound V(n) >= 1/e whenever the total odds reach 1. A violation is a bug.
inline OneOverEReport one_over_e_check(const OddsSequence& seq)
{
    OneOverEReport rep;
    rep.value = win_probability(seq, threshold(seq)).value;
    rep.applicable = tail_odds_sum(seq, 1) >= 1.0 - kTieTolerance;
    if (rep.applicable) {
        rep.margin = rep.value - 1.0 / std::numbers::e;
        // 1e-15 absorbs the rounding of V(n) itself.
        if (rep.margin < -1e-15) throw std::logic_error("1/e lower bound violated");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Model builders

/// Relative-rank records: p_k = 1/k.
inline OddsSequence secretary(std::size_t n)
{
    detail::require(n >= 1, "secretary needs n >= 1");
    std::vector<double> p(n);
    for (std::size_t k = 1; k <= n; ++k) p[k - 1] = 1.0 / static_cast<double>(k);
    return OddsSequence(std::move(p));
}

/// n throws of a fair die with the given number of faces; success = one fixed face.
inline OddsSequence dice(std::size_t n, std::size_t faces)
{
    detail::require(n >= 1, "dice needs n >= 1");
    detail::require(faces >= 2, "dice needs at least 2 faces");
    return OddsSequence(std::vector<double>(n, 1.0 / static_cast<double>(faces)));
}

/// Success must also be available: p~_k = p_k * a_k.
inline OddsSequence with_availability(const OddsSequence& seq, std::span<const double> avail)
{
    detail::require(avail.size() == seq.size(), "availability length must match horizon");
    std::vector<double> p(seq.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        detail::require(avail[k] >= 0.0 && avail[k] <= 1.0, "availability must lie in [0, 1]");
        p[k] = seq.probs()[k] * avail[k];
    }
    return OddsSequence(std::move(p));
}

/// Random number of observations: p_k = P(success | observation at k) * P(observation at k).
inline OddsSequence time_embedded(std::span<const double> cond_probs,
                                  std::span<const double> presence_probs)
{
    detail::require(cond_probs.size() == presence_probs.size(),
                    "conditional and presence probabilities must have equal length");
    std::vector<double> p(cond_probs.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        detail::require(presence_probs[k] >= 0.0 && presence_probs[k] <= 1.0,
                        "presence probabilities must lie in [0, 1]");
        p[k] = cond_probs[k] * presence_probs[k];
    }
    return OddsSequence(std::move(p));
}

/// Group interviews: group j succeeds when it holds the best of the first c_j
/// observations, which for exchangeable ranks has probability size_j / c_j.
inline OddsSequence grouped(std::span<const std::size_t> group_sizes)
{
    detail::require(!group_sizes.empty(), "grouped needs at least one group");
    std::vector<double> p(group_sizes.size());
    std::size_t cumulative = 0;
    for (std::size_t j = 0; j < group_sizes.size(); ++j) {
        detail::require(group_sizes[j] >= 1, "group sizes must be >= 1");
        cumulative += group_sizes[j];
        p[j] = static_cast<double>(group_sizes[j]) / static_cast<double>(cumulative);
    }
    return OddsSequence(std::move(p));
}

}  // namespace stoprule
