#pragma once
// Problem documents: the JSON form read by every subcommand and by the
// advisor service, plus the flag-to-document translation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <stoprule/markov.hpp>
#include <stoprule/odds.hpp>
#include <stoprule/policy.hpp>

namespace stoprule::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct MarkovParams {
    std::optional<double> alpha, beta;  ///< homogeneous form
    std::size_t N = 0;
    std::vector<double> alphas, betas;  ///< general form, indices 0..N+1
    double rho = 0.5;

    bool homogeneous() const { return alpha.has_value(); }
    MarkovSpec spec() const;
};

struct LapParams {
    double rate = 1.0;
    double thin_p = 1.0;
    double horizon = 1.0;
};

struct Problem {
    std::string kind;  ///< explicit-odds | secretary | dice | grouped | time-embedded |
                       ///< unknown-odds | markov | tamaki-markov | lap
    std::optional<OddsSequence> odds;
    std::size_t n = 0;  ///< horizon for unknown-odds
    std::optional<MarkovParams> markov;
    std::optional<TamakiSpec> tamaki;
    std::optional<LapParams> lap;
    Objective objective = Objective::last_success();
    bool objective_given = false;

    bool is_odds_model() const { return odds.has_value(); }
    const OddsSequence& require_odds() const;
};

/// Strict parse: unknown fields, wrong types, or an unknown schema_version raise InvalidInput.
Problem parse_problem(const json& doc);
Problem load_problem_file(const std::string& path);

Objective parse_objective(const json& obj);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace stoprule::cli
