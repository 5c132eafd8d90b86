#pragma once
// Ground-truth oracles: exhaustive enumeration of outcome vectors and
// finite-horizon backward induction. Nothing here uses odds tables or the
// closed-form thresholds, so it can referee them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "markov.hpp"
#include "odds.hpp"
#include "policy.hpp"

namespace stoprule {

inline constexpr std::size_t kEnumerationCap = 20;
inline constexpr std::size_t kDpCapLastSuccess = 25;
inline constexpr std::size_t kDpCapParameterised = 15;
inline constexpr std::size_t kDpCapMarkov = 25;

struct OracleResult {
    double optimal_value = 0.0;
    StoppingPolicy optimal_policy;
    /// Smallest |stop - continue| gap over indices with p_i > 0; near zero marks a tie.
    double min_margin = std::numeric_limits<double>::infinity();
};

struct MarkovOracleResult {
    double optimal_value = 0.0;
    MarkovPolicy optimal_policy{0};
    std::vector<double> q0, q1;  ///< q_x(n), n = 0..N
    double min_margin = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void require_enumerable(std::size_t n)
{
    if (n > kEnumerationCap)
        throw GuardExceeded("enumeration oracle is capped at n = " + std::to_string(kEnumerationCap));
}

/// Calls fn(x, weight) for all 2^n outcome vectors with non-zero probability.
template <class Fn>
void for_each_outcome(const OddsSequence& seq, Fn&& fn)
{
    const std::size_t n = seq.size();
    require_enumerable(n);
    std::vector<std::uint8_t> x(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<std::uint8_t>((bits >> i) & 1U);
            w *= x[i] ? seq.probs()[i] : 1.0 - seq.probs()[i];
        }
        if (w != 0.0) fn(std::span<const std::uint8_t>(x), w);
    }
}

/// dist[i][c] = P(c successes among indices i..n), i = 1..n+1.
inline std::vector<std::vector<double>> suffix_count_distributions(const OddsSequence& seq)
{
    const std::size_t n = seq.size();
    std::vector<std::vector<double>> dist(n + 2, std::vector<double>(n + 1, 0.0));
    dist[n + 1][0] = 1.0;
    for (std::size_t i = n; i >= 1; --i) {
        const double p = seq.p(i);
        for (std::size_t c = 0; c <= n; ++c) {
            dist[i][c] += dist[i + 1][c] * (1.0 - p);
            if (c + 1 <= n) dist[i][c + 1] += dist[i + 1][c] * p;
        }
    }
    return dist;
}

}  // namespace detail

/// Exact win probability of a deterministic policy, summed over all outcomes.
inline double enumerate_policy_value(const OddsSequence& seq, const StoppingPolicy& policy, const Objective& obj)
{
    detail::require_enumerable(seq.size());
    detail::require(policy.horizon() == seq.size(), "policy horizon differs from the model");
    obj.validate(seq.size());
    double total = 0.0;
    detail::for_each_outcome(seq, [&](std::span<const std::uint8_t> x, double w) {
        if (play(x, policy, obj)) total += w;
    });
    return total;
}

/// Both readings of "win" for multiple selection chances.
struct MultiSelectValues {
    double some_selection_is_last = 0.0;
    double final_selection_is_last = 0.0;
};

inline MultiSelectValues enumerate_multi_select_variants(const OddsSequence& seq, const StoppingPolicy& policy)
{
    detail::require(policy.horizon() == seq.size(), "policy horizon differs from the model");
    MultiSelectValues v;
    detail::for_each_outcome(seq, [&](std::span<const std::uint8_t> x, double w) {
        const auto out = play_multi_select(x, policy);
        if (out.some_selection_is_last) v.some_selection_is_last += w;
        if (out.final_selection_is_last) v.final_selection_is_last += w;
    });
    return v;
}

/// Backward induction over (index, chances left) for every objective in scope.
/// Ties resolve to continuing, which reproduces the smallest optimal window.
inline OracleResult dp_optimal(const OddsSequence& seq, const Objective& obj)
{
    const std::size_t n = seq.size();
    const std::size_t cap = obj.kind == ObjectiveKind::last_success ? kDpCapLastSuccess : kDpCapParameterised;
    if (n > cap) throw GuardExceeded("dynamic-programming oracle is capped at n = " + std::to_string(cap) + " for " + obj.name());
    obj.validate(n);

    const auto dist = detail::suffix_count_distributions(seq);
    OracleResult res;

    if (obj.kind == ObjectiveKind::multi_select) {
        const std::size_t M = obj.m;
        // U[i][c]: optimal win probability from index i on with c chances.
        std::vector<std::vector<double>> U(n + 2, std::vector<double>(M + 1, 0.0));
        std::vector<std::vector<bool>> masks(M, std::vector<bool>(n, false));
        for (std::size_t i = n; i >= 1; --i) {
            const double p = seq.p(i);
            for (std::size_t c = 1; c <= M; ++c) {
                const double select = dist[i + 1][0] + U[i + 1][c - 1];
                const double skip = U[i + 1][c];
                masks[c - 1][i - 1] = select > skip + kTieTolerance;
                if (p > 0.0) res.min_margin = std::min(res.min_margin, std::abs(select - skip));
                U[i][c] = p * std::max(select, skip) + (1.0 - p) * U[i + 1][c];
            }
        }
        res.optimal_value = U[1][M];
        res.optimal_policy = StoppingPolicy::multi(std::move(masks));
        return res;
    }

    auto stop_value = [&](std::size_t i) {
        const auto& after = dist[i + 1];
        switch (obj.kind) {
        case ObjectiveKind::last_success: return after[0];
        case ObjectiveKind::mth_last: return after[obj.m - 1];
        case ObjectiveKind::any_of_last_m: {
            double s = 0.0;
            for (std::size_t c = 0; c < obj.m; ++c) s += after[c];
            return s;
        }
        case ObjectiveKind::multi_select: break;
        }
        return 0.0;
    };

    double U = 0.0;
    std::vector<bool> mask(n, false);
    for (std::size_t i = n; i >= 1; --i) {
        const double p = seq.p(i);
        const double stop = stop_value(i);
        mask[i - 1] = stop > U + kTieTolerance;
        if (p > 0.0) res.min_margin = std::min(res.min_margin, std::abs(stop - U));
        U = p * std::max(stop, U) + (1.0 - p) * U;
    }
    res.optimal_value = U;
    res.optimal_policy = StoppingPolicy::from_mask(std::move(mask));
    return res;
}

/// q_0(n), q_1(n) recursions for the backward-indexed chain; stop at a success
/// at index j iff S_j >= q_1(j).
inline MarkovOracleResult dp_optimal_markov(const MarkovSpec& spec)
{
    const std::size_t N = spec.N();
    if (N > kDpCapMarkov) throw GuardExceeded("Markov oracle is capped at N = " + std::to_string(kDpCapMarkov));
    MarkovOracleResult res;
    res.q0.assign(N + 1, 0.0);
    res.q1.assign(N + 1, 0.0);
    res.optimal_policy = MarkovPolicy(N);

    // S_j via a running product, independent of MarkovSpec::survival_after_success.
    std::vector<double> S(N + 1, 1.0);
    double zeros = 1.0;  // prod_{i=1}^{j-1} (1 - alpha_i)
    for (std::size_t j = 1; j <= N; ++j) {
        S[j] = spec.beta(j) * zeros;
        zeros *= 1.0 - spec.alpha(j);
    }
    for (std::size_t n = 1; n <= N; ++n) {
        const double at_success = std::max(S[n - 1], res.q1[n - 1]);
        res.q0[n] = spec.alpha(n) * at_success + (1.0 - spec.alpha(n)) * res.q0[n - 1];
        res.q1[n] = (1.0 - spec.beta(n)) * at_success + spec.beta(n) * res.q0[n - 1];
    }
    for (std::size_t j = 0; j <= N; ++j) {
        res.optimal_policy.phi[j] = S[j] >= res.q1[j] ? 1 : 0;
        if (j >= 1) res.min_margin = std::min(res.min_margin, std::abs(S[j] - res.q1[j]));
    }
    res.optimal_value = spec.rho() * std::max(S[N], res.q1[N]) + (1.0 - spec.rho()) * res.q0[N];
    return res;
}

/// Embeds independent indicators (observed in order p_1, ..., p_n) as a
/// backward chain: I_N = first observation, transitions ignore the state.
inline MarkovSpec independent_markov_embedding(const OddsSequence& seq)
{
    const std::size_t N = seq.size() - 1;
    std::vector<double> a(N + 2, 0.0), b(N + 2, 1.0);
    for (std::size_t bidx = 1; bidx <= N; ++bidx) {
        const double p_next = seq.p(seq.size() - bidx + 1);  // P(I_{b-1} = 1)
        a[bidx] = p_next;
        b[bidx] = 1.0 - p_next;
    }
    return MarkovSpec(std::move(a), std::move(b), seq.p(1));
}

}  // namespace stoprule
