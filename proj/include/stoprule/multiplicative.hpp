#pragma once
// k-fold multiplicative odds R_j^{(k)} and the two "last m successes" rules.

#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "odds.hpp"

namespace stoprule {

/// R(j, k) = sum over j-subsets of {k..n} of the product of their odds,
/// for 0 <= j <= m and 1 <= k <= n+1, plus the positive-odds counts pi_k.
class MultiOddsTable {
public:
    MultiOddsTable(const OddsSequence& seq, std::size_t m) : n_(seq.size()), m_(m)
    {
        detail::require(m >= 1 && m <= n_, "multiplicative order m must satisfy 1 <= m <= n");
        if (seq.has_infinite_odds())
            throw UnsupportedInput("multiplicative odds need p_i < 1 for every index");
        table_.assign((m_ + 1) * (n_ + 2), 0.0);
        pi_.assign(n_ + 2, 0);
        for (std::size_t k = 1; k <= n_ + 1; ++k) at(0, k) = 1.0;
        for (std::size_t k = n_; k >= 1; --k) {
            const double r = seq.odds(k).value();
            pi_[k] = pi_[k + 1] + (r > 0.0 ? 1 : 0);
            for (std::size_t j = 1; j <= m_; ++j) at(j, k) = at(j, k + 1) + r * at(j - 1, k + 1);
        }
    }

    std::size_t horizon() const { return n_; }
    std::size_t order() const { return m_; }

    double R(std::size_t j, std::size_t k) const
    {
        detail::require(j <= m_ && k >= 1 && k <= n_ + 1, "R(j, k) index out of range");
        return table_[j * (n_ + 2) + k];
    }

    /// #{j >= k : r_j > 0}; pi(n+1) = 0.
    std::size_t pi(std::size_t k) const
    {
        detail::require(k >= 1 && k <= n_ + 1, "pi_k index out of range");
        return pi_[k];
    }

private:
    double& at(std::size_t j, std::size_t k) { return table_[j * (n_ + 2) + k]; }

    std::size_t n_;
    std::size_t m_;
    std::vector<double> table_;
    std::vector<std::size_t> pi_;
};

inline MultiOddsTable multi_odds(const OddsSequence& seq, std::size_t m) { return {seq, m}; }

/// Q_k = prod_{j=k}^n q_j (empty product for k = n+1).
inline double tail_q_product(const OddsSequence& seq, std::size_t k)
{
    double q = 1.0;
    for (std::size_t j = k; j <= seq.size(); ++j) q *= seq.q(j);
    return q;
}

/// Stop on a success when exactly m successes remain (counting the current one).
///
/// The threshold is the largest k <= n-m+1 with R_m^{(k)} >= R_{m-1}^{(k)} and
/// pi_k >= m, defaulting to 1. Extending the window from k+1 to k changes the
/// win probability Q_k R_m^{(k)} by p_k Q_{k+1} (R_{m-1}^{(k+1)} - R_m^{(k+1)}),
/// so this is where extending stops paying off.
inline ThresholdRule mth_last_threshold(const OddsSequence& seq, std::size_t m)
{
    detail::require(m >= 1 && m <= seq.size(), "m must satisfy 1 <= m <= n");
    const MultiOddsTable tab(seq, m);
    for (std::size_t k = seq.size() - m + 1; k >= 1; --k) {
        if (tab.pi(k) >= m && tab.R(m, k) >= tab.R(m - 1, k) - kTieTolerance) return {k};
    }
    return {1};
}

/// The literal form R_m^{(k)} >= m R_{m-1}^{(k)}. Suboptimal for m >= 2 with the
/// subset definition of R; kept for the discrepancy report.
inline ThresholdRule mth_last_threshold_as_printed(const OddsSequence& seq, std::size_t m)
{
    detail::require(m >= 1 && m <= seq.size(), "m must satisfy 1 <= m <= n");
    const MultiOddsTable tab(seq, m);
    const double weight = static_cast<double>(m);
    for (std::size_t k = seq.size() - m + 1; k >= 1; --k) {
        if (tab.pi(k) >= m && tab.R(m, k) >= weight * tab.R(m - 1, k) - kTieTolerance) return {k};
    }
    return {1};
}

/// P(exactly m successes in [s, n]) = Q_s R_m^{(s)}: value of a threshold rule
/// for the m-th-last objective.
inline WinProb mth_last_value(const OddsSequence& seq, std::size_t m, ThresholdRule rule)
{
    const MultiOddsTable tab(seq, m);
    return {tail_q_product(seq, rule.s) * tab.R(m, rule.s)};
}

/// Stop on any of the last m successes: s_m = min{k >= 1 : R_m^{(k+1)} <= 1}.
inline ThresholdRule last_m_threshold(const OddsSequence& seq, std::size_t m)
{
    detail::require(m >= 1 && m <= seq.size(), "m must satisfy 1 <= m <= n");
    const MultiOddsTable tab(seq, m);
    for (std::size_t k = 1; k <= seq.size(); ++k) {
        if (tab.R(m, k + 1) <= 1.0 + kTieTolerance) return {k};
    }
    return {seq.size()};  // unreachable: R_m^{(n+1)} = 0
}

/// v_m = Q_{s_m} * sum_{j=1}^m R_j^{(s_m)} = P(1 <= #successes in [s_m, n] <= m).
inline WinProb last_m_value(const OddsSequence& seq, std::size_t m)
{
    const ThresholdRule rule = last_m_threshold(seq, m);
    const MultiOddsTable tab(seq, m);
    double sum = 0.0;
    for (std::size_t j = 1; j <= m; ++j) sum += tab.R(j, rule.s);
    return {tail_q_product(seq, rule.s) * sum};
}

}  // namespace stoprule
