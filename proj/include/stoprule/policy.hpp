#pragma once
// Stopping policies, objectives, and the outcome semantics shared by the
// enumeration oracle and the simulator.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "multi_select.hpp"
#include "odds.hpp"

namespace stoprule {

enum class ObjectiveKind { last_success, mth_last, any_of_last_m, multi_select };

struct Objective {
    ObjectiveKind kind = ObjectiveKind::last_success;
    std::size_t m = 1;  ///< m for mth-last / any-of-last-m, M for multi-select

    static Objective last_success() { return {ObjectiveKind::last_success, 1}; }
    static Objective mth_last(std::size_t m) { return {ObjectiveKind::mth_last, m}; }
    static Objective any_of_last_m(std::size_t m) { return {ObjectiveKind::any_of_last_m, m}; }
    static Objective multi_select(std::size_t chances) { return {ObjectiveKind::multi_select, chances}; }

    std::size_t chances() const { return kind == ObjectiveKind::multi_select ? m : 1; }

    void validate(std::size_t n) const
    {
        detail::require(m >= 1, "objective parameter must be >= 1");
        if (kind == ObjectiveKind::mth_last || kind == ObjectiveKind::any_of_last_m)
            detail::require(m <= n, "objective parameter m exceeds the horizon");
    }

    std::string name() const
    {
        switch (kind) {
        case ObjectiveKind::last_success: return "last-success";
        case ObjectiveKind::mth_last: return "mth-last(" + std::to_string(m) + ")";
        case ObjectiveKind::any_of_last_m: return "any-of-last-m(" + std::to_string(m) + ")";
        case ObjectiveKind::multi_select: return "multi-select(" + std::to_string(m) + ")";
        }
        return {};
    }
};

/// Deterministic policy: stop (select) a success at index i when c chances are left.
/// Single-stop policies have one chance level.
class StoppingPolicy {
public:
    StoppingPolicy() = default;

    static StoppingPolicy from_mask(std::vector<bool> mask)
    {
        StoppingPolicy pol;
        pol.n_ = mask.size();
        pol.masks_.push_back(std::move(mask));
        return pol;
    }

    static StoppingPolicy threshold(std::size_t n, ThresholdRule rule)
    {
        std::vector<bool> mask(n);
        for (std::size_t i = 1; i <= n; ++i) mask[i - 1] = i >= rule.s;
        return from_mask(std::move(mask));
    }

    static StoppingPolicy never(std::size_t n) { return from_mask(std::vector<bool>(n, false)); }

    /// masks[c-1][i-1]: select at index i with c chances left.
    static StoppingPolicy multi(std::vector<std::vector<bool>> masks)
    {
        detail::require(!masks.empty(), "multi-stop policy needs at least one chance level");
        StoppingPolicy pol;
        pol.n_ = masks.front().size();
        for (const auto& m : masks) detail::require(m.size() == pol.n_, "chance-level masks differ in length");
        pol.masks_ = std::move(masks);
        return pol;
    }

    static StoppingPolicy multi(std::size_t n, const MultiSelectRule& rule)
    {
        std::vector<std::vector<bool>> masks(rule.chances(), std::vector<bool>(n));
        for (std::size_t c = 1; c <= rule.chances(); ++c)
            for (std::size_t i = 1; i <= n; ++i) masks[c - 1][i - 1] = rule.selects(i, c);
        return multi(std::move(masks));
    }

    std::size_t horizon() const { return n_; }
    std::size_t chances() const { return masks_.size(); }

    bool stops(std::size_t index, std::size_t chances_left = 1) const
    {
        return masks_.at(chances_left - 1).at(index - 1);
    }

    /// s when the single-chance mask is exactly {s, ..., n}.
    std::optional<std::size_t> as_threshold() const
    {
        if (masks_.size() != 1) return std::nullopt;
        const auto& m = masks_.front();
        std::size_t s = n_ + 1;
        while (s > 1 && m[s - 2]) --s;
        for (std::size_t i = 1; i < s; ++i)
            if (m[i - 1]) return std::nullopt;
        if (s > n_) return std::nullopt;
        return s;
    }

    bool operator==(const StoppingPolicy&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::vector<bool>> masks_;
};

/// Online rule consulted at a success at index k with the indicators x_1..x_k.
struct AdaptivePolicy {
    std::size_t n = 0;
    std::function<bool(std::size_t k, std::span<const std::uint8_t> history)> stop_at_success;
};

// ---------------------------------------------------------------------------
// Outcome semantics

/// First success at which the policy stops (1-based), if any.
inline std::optional<std::size_t> first_stop(std::span<const std::uint8_t> x, const StoppingPolicy& policy)
{
    for (std::size_t i = 1; i <= x.size(); ++i)
        if (x[i - 1] && policy.stops(i)) return i;
    return std::nullopt;
}

inline std::optional<std::size_t> first_stop(std::span<const std::uint8_t> x, const AdaptivePolicy& policy)
{
    for (std::size_t i = 1; i <= x.size(); ++i)
        if (x[i - 1] && policy.stop_at_success(i, x.first(i))) return i;
    return std::nullopt;
}

/// Win for a single-stop objective given the realised stopping index.
inline bool single_stop_wins(std::span<const std::uint8_t> x, std::optional<std::size_t> tau, const Objective& obj)
{
    if (!tau) return false;
    std::size_t remaining = 0;  // successes in [tau, n]
    for (std::size_t i = *tau; i <= x.size(); ++i) remaining += x[i - 1];
    switch (obj.kind) {
    case ObjectiveKind::last_success: return remaining == 1;
    case ObjectiveKind::mth_last: return remaining == obj.m;
    case ObjectiveKind::any_of_last_m: return remaining <= obj.m;
    case ObjectiveKind::multi_select: break;
    }
    throw InvalidInput("multi-select objective needs the multi-stop evaluator");
}

struct MultiSelectOutcome {
    bool some_selection_is_last = false;
    bool final_selection_is_last = false;
};

inline MultiSelectOutcome play_multi_select(std::span<const std::uint8_t> x, const StoppingPolicy& policy)
{
    std::size_t chances = policy.chances();
    std::optional<std::size_t> last_success;
    std::vector<std::size_t> selected;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        if (!x[i - 1]) continue;
        last_success = i;
        if (chances > 0 && policy.stops(i, chances)) {
            selected.push_back(i);
            --chances;
        }
    }
    MultiSelectOutcome out;
    if (!last_success) return out;
    out.some_selection_is_last = std::find(selected.begin(), selected.end(), *last_success) != selected.end();
    out.final_selection_is_last = !selected.empty() && selected.back() == *last_success;
    return out;
}

inline bool play(std::span<const std::uint8_t> x, const StoppingPolicy& policy, const Objective& obj)
{
    if (obj.kind == ObjectiveKind::multi_select) return play_multi_select(x, policy).some_selection_is_last;
    return single_stop_wins(x, first_stop(x, policy), obj);
}

inline bool play(std::span<const std::uint8_t> x, const AdaptivePolicy& policy, const Objective& obj)
{
    return single_stop_wins(x, first_stop(x, policy), obj);
}

}  // namespace stoprule
