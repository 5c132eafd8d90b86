#pragma once
// Multiple selection chances: H-table recursion and nested thresholds.
//
// Win convention: a play wins iff one of the selected indices is the last
// success. Equivalently, the final selection is the last success (nothing can
// be selected after the last success).

#include <algorithm>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "odds.hpp"

namespace stoprule {

class HTable {
public:
    HTable(const OddsSequence& seq, std::size_t chances) : n_(seq.size()), chances_(chances)
    {
        detail::require(chances >= 1, "need at least one selection chance");
        if (seq.has_infinite_odds()) throw UnsupportedInput("H-table needs p_i < 1 for every index");

        std::vector<double> r(n_ + 2, 0.0);
        for (std::size_t i = 1; i <= n_; ++i) r[i] = seq.odds(i).value();

        h_.assign(chances_ * (n_ + 2), 0.0);
        thresholds_.assign(chances_ + 1, n_);

        // H(i,1) = 1 - sum_{j>i} r_j
        double tail = 0.0;
        for (std::size_t i = n_; i >= 1; --i) {
            at(i, 1) = 1.0 - tail;
            tail += r[i];
        }
        thresholds_[1] = first_positive(1);

        // H(i,m) = H(i,1) + sum_{j = max(i+1, i*(m-1))}^N r_j H(j, m-1)
        std::vector<double> weighted_tail(n_ + 2, 0.0);
        for (std::size_t m = 2; m <= chances_; ++m) {
            for (std::size_t j = n_; j >= 1; --j)
                weighted_tail[j] = weighted_tail[j + 1] + r[j] * at(j, m - 1);
            const std::size_t prev = thresholds_[m - 1];
            for (std::size_t i = 1; i <= n_; ++i) {
                const std::size_t lo = std::max(i + 1, prev);
                at(i, m) = at(i, 1) + weighted_tail[lo];
            }
            thresholds_[m] = first_positive(m);
        }
    }

    std::size_t horizon() const { return n_; }
    std::size_t chances() const { return chances_; }

    double H(std::size_t i, std::size_t m) const
    {
        detail::require(i >= 1 && i <= n_ && m >= 1 && m <= chances_, "H(i, m) index out of range");
        return h_[(m - 1) * (n_ + 2) + i];
    }

    /// i_*^{(m)} = min{i : H(i,m) > 0}.
    std::size_t threshold(std::size_t m) const
    {
        detail::require(m >= 1 && m <= chances_, "chance level out of range");
        return thresholds_[m];
    }

private:
    double& at(std::size_t i, std::size_t m) { return h_[(m - 1) * (n_ + 2) + i]; }

    std::size_t first_positive(std::size_t m)
    {
        for (std::size_t i = 1; i <= n_; ++i)
            if (at(i, m) > kTieTolerance) return i;
        return n_;  // H(N, m) >= 1, unreachable
    }

    std::size_t n_;
    std::size_t chances_;
    std::vector<double> h_;
    std::vector<std::size_t> thresholds_;
};

inline HTable h_table(const OddsSequence& seq, std::size_t chances) { return {seq, chances}; }

/// With c chances left, select the next success at index >= i_*^{(c)}.
class MultiSelectRule {
public:
    explicit MultiSelectRule(std::vector<std::size_t> thresholds) : thresholds_(std::move(thresholds))
    {
        detail::require(!thresholds_.empty(), "multi-select rule needs at least one chance");
    }

    std::size_t chances() const { return thresholds_.size(); }

    /// Threshold armed when `chances_left` selections remain (1-based).
    std::size_t threshold(std::size_t chances_left) const { return thresholds_.at(chances_left - 1); }

    bool selects(std::size_t index, std::size_t chances_left) const
    {
        return chances_left >= 1 && index >= threshold(chances_left);
    }

private:
    std::vector<std::size_t> thresholds_;
};

inline MultiSelectRule multi_select_rule(const OddsSequence& seq, std::size_t chances)
{
    const HTable tab(seq, chances);
    std::vector<std::size_t> th(chances);
    for (std::size_t m = 1; m <= chances; ++m) th[m - 1] = tab.threshold(m);
    return MultiSelectRule(std::move(th));
}

}  // namespace stoprule
