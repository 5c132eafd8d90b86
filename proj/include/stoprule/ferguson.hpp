#pragma once
// One-stage look-ahead (1-sla) over processes absorbed at 0, and its Bernoulli
// specialisation that recovers the multiplicative-odds thresholds.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "odds.hpp"

namespace stoprule {

/// Per-stage ingredients of the 1-sla rule for a (possibly capped) horizon:
///   V_k = P(Z_{k+1} = 0 | G_k),  W_k = P(Z_{k+1} != 0, Z_{k+2} = 0 | G_k).
/// Stage k is stored at index k-1; the horizon is the stored length (the cap).
struct SlaModel {
    double omega = 0.0;
    std::vector<double> v_seq;
    std::vector<double> w_seq;
    std::vector<bool> absorbed;

    std::size_t horizon() const { return v_seq.size(); }

    void validate() const
    {
        detail::require(omega < 1.0, "terminal reward omega must be < 1");
        detail::require(w_seq.size() == v_seq.size() && absorbed.size() == v_seq.size(),
                        "V, W and absorption sequences must have equal length");
        for (std::size_t i = 0; i < v_seq.size(); ++i) {
            detail::require(v_seq[i] >= 0.0 && v_seq[i] <= 1.0 && w_seq[i] >= 0.0 && w_seq[i] <= 1.0,
                            "V_k and W_k must lie in [0, 1]");
        }
    }
};

struct SlaStop {
    std::size_t stage = 0;      ///< 1-based stopping stage, or the cap when never stopped
    bool never_stopped = false; ///< maps to the Y_infinity = omega payoff
};

/// N = min{k : Z_k absorbed, or W_k / V_k <= 1 - omega}.
inline SlaStop one_sla_stop(const SlaModel& model)
{
    model.validate();
    for (std::size_t k = 1; k <= model.horizon(); ++k) {
        if (model.absorbed[k - 1]) return {k, false};
        const double v = model.v_seq[k - 1];
        if (v == 0.0) throw DomainError("V_k = 0 at stage " + std::to_string(k));
        if (model.w_seq[k - 1] / v <= 1.0 - model.omega + kTieTolerance) return {k, false};
    }
    return {model.horizon(), true};
}

/// True iff W_k / V_k is non-increasing over the non-absorbed stages.
inline bool monotone_check(const SlaModel& model)
{
    std::optional<double> prev;
    for (std::size_t k = 0; k < model.horizon(); ++k) {
        if (model.absorbed[k] || model.v_seq[k] == 0.0) continue;
        const double ratio = model.w_seq[k] / model.v_seq[k];
        if (prev && ratio > *prev + kTieTolerance) return false;
        prev = ratio;
    }
    return true;
}

/// Bernoulli stages: V_k = P(X_{k+1} + ... + X_n = 0), W_k = P(X_{k+1} + ... + X_n = m),
/// computed from the distribution of future success counts (not from odds tables).
inline SlaModel bernoulli_sla_model(const OddsSequence& seq, std::size_t m)
{
    const std::size_t n = seq.size();
    detail::require(m >= 1 && m <= n, "m must satisfy 1 <= m <= n");
    if (seq.has_infinite_odds()) throw UnsupportedInput("Bernoulli 1-sla reduction needs p_i < 1");

    SlaModel model;
    model.omega = 0.0;
    model.v_seq.resize(n);
    model.w_seq.resize(n);
    model.absorbed.assign(n, false);

    // dist[c] = P(c successes among X_{k+1..n}), truncated at m
    std::vector<double> dist(m + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t k = n; k >= 1; --k) {
        model.v_seq[k - 1] = dist[0];
        model.w_seq[k - 1] = dist[m];
        const double p = seq.p(k);
        for (std::size_t c = m; c >= 1; --c) dist[c] = dist[c] * (1.0 - p) + dist[c - 1] * p;
        dist[0] *= 1.0 - p;
    }
    return model;
}

/// N_m = min{k : W_k / V_k <= 1} on the Bernoulli reduction, as a threshold rule.
inline ThresholdRule bernoulli_sla(const OddsSequence& seq, std::size_t m)
{
    const SlaStop stop = one_sla_stop(bernoulli_sla_model(seq, m));
    return {stop.stage};
}

}  // namespace stoprule
