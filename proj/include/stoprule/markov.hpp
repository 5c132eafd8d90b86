#pragma once
// Threshold policies for Markov-dependent success indicators.
//
// Hsiao-Yang models index the chain backwards: I_N is observed first and I_0
// last. Tamaki's model indexes forwards, I_1 first and I_n last.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "odds.hpp"

namespace stoprule {

/// Case of a printed theorem is not covered (e.g. beta = 0).
class UnsupportedRegime : public AssumptionViolation {
public:
    using AssumptionViolation::AssumptionViolation;
};

/// Backward-indexed chain I_N, ..., I_0 with
///   alpha_n = P(I_{n-1} = 1 | I_n = 0),  beta_n = P(I_{n-1} = 0 | I_n = 1).
/// Parameters are stored for n = 0..N+1; only n = 1..N drive the chain, the
/// boundary entries appear in the nonhomogeneous threshold formula.
class MarkovSpec {
public:
    MarkovSpec(std::vector<double> alphas, std::vector<double> betas, double rho = 0.5)
        : alphas_(std::move(alphas)), betas_(std::move(betas)), rho_(rho)
    {
        detail::require(alphas_.size() == betas_.size(), "alpha and beta lists must have equal length");
        detail::require(alphas_.size() >= 2, "Markov parameters must cover indices 0..N+1");
        for (std::size_t i = 0; i < alphas_.size(); ++i) {
            detail::require(in_unit(alphas_[i]) && in_unit(betas_[i]),
                            "transition probabilities must lie in [0, 1]");
        }
        detail::require(in_unit(rho_), "rho must lie in [0, 1]");
    }

    static MarkovSpec homogeneous(double alpha, double beta, std::size_t N, double rho = 0.5)
    {
        return MarkovSpec(std::vector<double>(N + 2, alpha), std::vector<double>(N + 2, beta), rho);
    }

    std::size_t N() const { return alphas_.size() - 2; }
    double alpha(std::size_t n) const { return alphas_.at(n); }
    double beta(std::size_t n) const { return betas_.at(n); }
    /// P(I_N = 1).
    double rho() const { return rho_; }

    MarkovSpec with_rho(double rho) const { return MarkovSpec(alphas_, betas_, rho); }

    /// S_n = P(I_j = 0 for all j < n | I_n = 1) = beta_n prod_{i=1}^{n-1} (1 - alpha_i); S_0 = 1.
    double survival_after_success(std::size_t n) const
    {
        if (n == 0) return 1.0;
        double s = beta(n);
        for (std::size_t i = 1; i < n; ++i) s *= 1.0 - alpha(i);
        return s;
    }

private:
    static bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

    std::vector<double> alphas_;
    std::vector<double> betas_;
    double rho_;
};

/// phi_j = 1: stop at backward index j if I_j = 1. phi_0 = 1 always.
struct MarkovPolicy {
    explicit MarkovPolicy(std::size_t N) : phi(N + 1, 0) { phi[0] = 1; }

    static MarkovPolicy stop_up_to(std::size_t N, std::size_t r)
    {
        MarkovPolicy pol(N);
        for (std::size_t j = 0; j <= std::min(r, N); ++j) pol.phi[j] = 1;
        return pol;
    }

    std::size_t N() const { return phi.size() - 1; }
    bool stops(std::size_t j) const { return phi.at(j) != 0; }

    /// Number of maximal blocks of stopping indices (counting {0}).
    std::size_t islands() const
    {
        std::size_t count = 0;
        for (std::size_t j = 0; j < phi.size(); ++j)
            if (phi[j] && (j == 0 || !phi[j - 1])) ++count;
        return count;
    }

    std::vector<std::uint8_t> phi;
};

/// Which printed case produced a policy, with the intermediate quantities.
struct HyPolicy {
    MarkovPolicy policy;
    std::string regime;
    std::optional<long long> r;
    std::optional<long long> m;
    bool near_integer_floor = false;  ///< a floor argument sat within 1e-12 of an integer
};

namespace detail {

inline long long guarded_floor(double x, bool& flagged)
{
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) {
        flagged = true;
        return static_cast<long long>(nearest);
    }
    return static_cast<long long>(std::floor(x));
}

}  // namespace detail

/// (alpha + beta) beta (1 - alpha)^n - beta (1 - alpha - beta)^{n+1}.
inline double hy_crossing_quantity(double alpha, double beta, std::size_t n)
{
    const double k = static_cast<double>(n);
    return (alpha + beta) * beta * std::pow(1.0 - alpha, k) - beta * std::pow(1.0 - alpha - beta, k + 1.0);
}

/// Hsiao-Yang homogeneous chain (alpha_n = alpha, beta_n = beta), every printed case.
inline HyPolicy hy_homogeneous_policy(double alpha, double beta, std::size_t N)
{
    detail::require(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0,
                    "alpha and beta must lie in [0, 1]");
    HyPolicy out{MarkovPolicy(N), {}, {}, {}, false};
    auto& phi = out.policy.phi;

    if (beta >= 0.5) {
        if (alpha == 0.0) {
            out.regime = "beta>=1/2:alpha=0";
            std::fill(phi.begin(), phi.end(), 1);
            return out;
        }
        if (alpha == 1.0) {
            out.regime = "beta>=1/2:alpha=1";
            if (N >= 1) phi[1] = 1;
            return out;
        }
        out.regime = "beta>=1/2:interior";
        const double x = (beta - 2.0 * alpha) * (1.0 - alpha) / (alpha * beta);
        long long r = detail::guarded_floor(x, out.near_integer_floor) + 2;
        r = std::min<long long>(r, static_cast<long long>(N));
        out.r = r;
        for (long long j = 0; j <= r; ++j) phi[static_cast<std::size_t>(j)] = 1;
        return out;
    }

    if (beta <= 0.0) throw UnsupportedRegime("Hsiao-Yang homogeneous theorem does not cover beta = 0");

    std::optional<std::size_t> crossing;
    for (std::size_t n = 0; n < N; ++n) {
        if (hy_crossing_quantity(alpha, beta, n) >= alpha) {
            crossing = n;
            break;
        }
    }
    if (!crossing) {
        out.regime = "beta<1/2:never-crosses";
        return out;
    }
    const std::size_t r = *crossing;
    if (r < 1) throw UnsupportedRegime("crossing index r = 0 is outside the printed cases");
    out.r = static_cast<long long>(r);

    if (alpha != 0.0) {
        out.regime = "beta<1/2:two-islands";
        const double base = std::pow(1.0 - alpha, static_cast<double>(r) - 1.0);
        const double denom = alpha * beta * (alpha + beta) * base;
        if (denom == 0.0) throw DomainError("island length formula divides by zero (alpha = 1)");
        const double numer = (alpha + beta) * (alpha * alpha - alpha + beta) * base
                             - alpha * (1.0 - std::pow(1.0 - alpha - beta, static_cast<double>(r) + 1.0));
        const long long m = detail::guarded_floor(numer / denom, out.near_integer_floor) + 1;
        out.m = m;
        const long long top = std::min<long long>(static_cast<long long>(r) + m, static_cast<long long>(N));
        for (long long j = static_cast<long long>(r) + 1; j <= top; ++j) phi[static_cast<std::size_t>(j)] = 1;
        return out;
    }

    out.regime = "beta<1/2:alpha=0";
    for (std::size_t j = r; j <= N; ++j) phi[j] = 1;
    return out;
}

/// Hsiao-Yang nonhomogeneous theorem, valid when alpha_n + beta_n >= 1 for all n.
/// r = inf{k : sum_{l=1}^k a_l b_{l-1} / ((1-a_l)(1-a_{l-1})) + b_k (1-b_{k+1}) / (b_{k+1} (1-a_k)) > 1},
/// with r = N when no k in 0..N qualifies.
inline HyPolicy hy_nonhomogeneous_policy(const MarkovSpec& spec)
{
    const std::size_t N = spec.N();
    for (std::size_t n = 0; n <= N + 1; ++n) {
        if (spec.alpha(n) + spec.beta(n) < 1.0)
            throw AssumptionViolation("nonhomogeneous theorem needs alpha_n + beta_n >= 1 (fails at n = "
                                      + std::to_string(n) + ")");
    }
    HyPolicy out{MarkovPolicy(N), "nonhomogeneous", {}, {}, false};
    double acc = 0.0;
    std::size_t r = N;
    for (std::size_t k = 0; k <= N; ++k) {
        if (k >= 1) {
            const double d = (1.0 - spec.alpha(k)) * (1.0 - spec.alpha(k - 1));
            if (d == 0.0) throw DomainError("alpha_l = 1 makes the nonhomogeneous sum undefined");
            acc += spec.alpha(k) * spec.beta(k - 1) / d;
        }
        const double d = spec.beta(k + 1) * (1.0 - spec.alpha(k));
        if (d == 0.0) throw DomainError("beta_{k+1} = 0 or alpha_k = 1 makes the nonhomogeneous term undefined");
        if (acc + spec.beta(k) * (1.0 - spec.beta(k + 1)) / d > 1.0 + kTieTolerance) {
            r = k;
            break;
        }
    }
    out.r = static_cast<long long>(r);
    out.policy = MarkovPolicy::stop_up_to(N, r);
    return out;
}

/// Exact probability that `policy` stops on the last success of the chain.
/// Forward pass over (index, state) carrying the mass not yet stopped.
inline WinProb markov_policy_value(const MarkovSpec& spec, const MarkovPolicy& policy)
{
    const std::size_t N = spec.N();
    detail::require(policy.N() == N, "policy and chain horizons differ");
    double p1 = spec.rho();
    double p0 = 1.0 - spec.rho();
    double value = 0.0;
    for (std::size_t j = N;; --j) {
        if (policy.stops(j)) {
            value += p1 * spec.survival_after_success(j);
            p1 = 0.0;
        }
        if (j == 0) break;
        const double next1 = p0 * spec.alpha(j) + p1 * (1.0 - spec.beta(j));
        const double next0 = p0 * (1.0 - spec.alpha(j)) + p1 * spec.beta(j);
        p1 = next1;
        p0 = next0;
    }
    return {value};
}

// ---------------------------------------------------------------------------
// Tamaki's forward-indexed Markov model

enum class AssumptionCheck { enforce, skip };

/// Forward chain I_1, ..., I_n with alpha_j = P(I_{j+1} = 1 | I_j = 0) and
/// beta_j = P(I_{j+1} = 0 | I_j = 1) for j < n; alpha_n = 0 and beta_n = 1 are fixed.
class TamakiSpec {
public:
    /// `alphas`, `betas` hold j = 1..n-1; the boundary at j = n is appended.
    TamakiSpec(std::vector<double> alphas, std::vector<double> betas, double rho = 0.5)
        : alphas_(std::move(alphas)), betas_(std::move(betas)), rho_(rho)
    {
        detail::require(alphas_.size() == betas_.size(), "alpha and beta lists must have equal length");
        for (std::size_t i = 0; i < alphas_.size(); ++i) {
            detail::require(alphas_[i] >= 0.0 && alphas_[i] <= 1.0 && betas_[i] >= 0.0 && betas_[i] <= 1.0,
                            "transition probabilities must lie in [0, 1]");
        }
        detail::require(rho_ >= 0.0 && rho_ <= 1.0, "rho must lie in [0, 1]");
        alphas_.push_back(0.0);
        betas_.push_back(1.0);
    }

    std::size_t n() const { return alphas_.size(); }
    double alpha(std::size_t j) const { return alphas_.at(j - 1); }
    double beta(std::size_t j) const { return betas_.at(j - 1); }
    /// P(I_1 = 1).
    double rho() const { return rho_; }

    /// Monotonicity and concavity hypotheses; empty string when they hold.
    std::string assumption_failure() const
    {
        const std::size_t len = n();
        for (std::size_t j = 1; j < len; ++j) {
            if (alpha(j + 1) > alpha(j) + kTieTolerance) return "alpha_j must be non-increasing (j = " + std::to_string(j) + ")";
            if (beta(j + 1) < beta(j) - kTieTolerance) return "beta_j must be non-decreasing (j = " + std::to_string(j) + ")";
        }
        for (std::size_t j = 2; j < len; ++j) {
            if (beta(j + 1) - 2.0 * beta(j) + beta(j - 1) > kTieTolerance)
                return "beta_j must be concave (j = " + std::to_string(j) + ")";
        }
        return {};
    }

    /// Equivalent backward-indexed chain: backward index b = n - j.
    MarkovSpec to_backward() const
    {
        const std::size_t N = n() - 1;
        std::vector<double> a(N + 2), b(N + 2);
        for (std::size_t k = 1; k <= N; ++k) {
            a[k] = alpha(n() - k);
            b[k] = beta(n() - k);
        }
        a[0] = alpha(n());
        b[0] = beta(n());
        a[N + 1] = alpha(1);
        b[N + 1] = beta(1);
        return MarkovSpec(std::move(a), std::move(b), rho_);
    }

    /// Forward rule "stop on first success at k >= s" as a backward policy.
    MarkovPolicy backward_policy(ThresholdRule rule) const
    {
        const std::size_t N = n() - 1;
        MarkovPolicy pol(N);
        for (std::size_t b = 0; b <= N; ++b) pol.phi[b] = (n() - b >= rule.s) ? 1 : 0;
        return pol;
    }

private:
    std::vector<double> alphas_;
    std::vector<double> betas_;
    double rho_;
};

/// Markov analogue of the independent indicators with probabilities p_1..p_n:
/// alpha_j = p_{j+1}, beta_j = 1 - p_{j+1}.
inline TamakiSpec tamaki_independent_embedding(const OddsSequence& seq)
{
    std::vector<double> a, b;
    for (std::size_t j = 1; j < seq.size(); ++j) {
        a.push_back(seq.p(j + 1));
        b.push_back(1.0 - seq.p(j + 1));
    }
    return TamakiSpec(std::move(a), std::move(b), seq.p(1));
}

/// s = sup{1 <= k <= n : (bbar_k / b_k)(b_{k+1} / abar_{k+1})
///                       + sum_{j=k+1}^{n-1} (a_j / abar_j)(b_{j+1} / abar_{j+1}) >= 1}, sup of
/// the empty set taken as 1.
inline ThresholdRule tamaki_markov_threshold(const TamakiSpec& spec,
                                             AssumptionCheck check = AssumptionCheck::enforce)
{
    if (check == AssumptionCheck::enforce) {
        if (auto why = spec.assumption_failure(); !why.empty())
            throw AssumptionViolation("Tamaki threshold hypotheses fail: " + why);
    }
    const std::size_t n = spec.n();
    auto ratio = [&](double numer, std::size_t j) {
        const double abar = 1.0 - spec.alpha(j);
        if (abar == 0.0) throw DomainError("alpha_j = 1 makes the Tamaki sum undefined");
        return numer / abar;
    };
    // tail[k] = sum_{j=k+1}^{n-1} (a_j/abar_j)(b_{j+1}/abar_{j+1})
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t k = n - 1; k >= 1; --k) {
        tail[k] = tail[k + 1];
        if (k + 1 <= n - 1) tail[k] += ratio(spec.alpha(k + 1), k + 1) * ratio(spec.beta(k + 2), k + 2);
    }
    for (std::size_t k = n; k >= 1; --k) {
        double lead = 0.0;
        const double bbar = 1.0 - spec.beta(k);
        if (bbar != 0.0) {
            if (spec.beta(k) == 0.0) throw DomainError("beta_k = 0 makes the Tamaki lead term undefined");
            lead = bbar / spec.beta(k) * ratio(spec.beta(k + 1), k + 1);
        }
        if (lead + tail[k] >= 1.0 - kTieTolerance) return {k};
    }
    return {1};
}

}  // namespace stoprule
