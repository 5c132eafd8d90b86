#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <stoprule/stoprule.hpp>

#include "advisor.hpp"
#include "problem.hpp"

namespace stoprule::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
    std::string problem_file;
    std::string model;
    std::string p, avail, sizes, cond, presence, alphas, betas;
    std::optional<std::size_t> n, faces, N, m, M, s;
    std::optional<double> alpha, beta, rho, rate, thin_p, horizon;
    std::string objective;
    std::string format = "table";
    std::optional<std::uint64_t> seed;
    std::uint64_t trials = 100000;
    unsigned workers = 1;

    // subcommand specific
    std::string observations;
    std::string policy = "optimal";
    std::string times, grid;
    std::string v_seq, w_seq, absorbed;
    double omega = 0.0;
    bool no_assumption_check = false;
    std::string host = "127.0.0.1";
    int port = 8765;
};

void add_model_options(CLI::App& cmd, Options& o)
{
    cmd.add_option("--problem", o.problem_file, "Problem file (JSON, see docs/problem-schema.md)");
    cmd.add_option("--model", o.model, "explicit-odds|secretary|dice|grouped|time-embedded|unknown-odds|markov|tamaki-markov|lap");
    cmd.add_option("--p", o.p, "Comma-separated success probabilities (explicit odds), or the thinning probability for lap");
    cmd.add_option("--n", o.n, "Horizon");
    cmd.add_option("--faces", o.faces, "Die faces (dice)");
    cmd.add_option("--avail", o.avail, "Comma-separated availability probabilities");
    cmd.add_option("--sizes", o.sizes, "Comma-separated group sizes (grouped)");
    cmd.add_option("--cond", o.cond, "Conditional success probabilities (time-embedded)");
    cmd.add_option("--presence", o.presence, "Observation presence probabilities (time-embedded)");
    cmd.add_option("--alpha", o.alpha, "Homogeneous alpha (markov)");
    cmd.add_option("--beta", o.beta, "Homogeneous beta (markov)");
    cmd.add_option("--N", o.N, "Backward horizon N (markov)");
    cmd.add_option("--alphas", o.alphas, "alpha list (markov: n = 0..N+1; tamaki-markov: j = 1..n-1)");
    cmd.add_option("--betas", o.betas, "beta list, same indexing as --alphas");
    cmd.add_option("--rho", o.rho, "Probability that the first observed indicator is a success");
    cmd.add_option("--rate", o.rate, "Base Poisson rate (lap)");
    cmd.add_option("--thin-p", o.thin_p, "Thinning probability (lap)");
    cmd.add_option("--T", o.horizon, "Time horizon (lap)");
    cmd.add_option("--objective", o.objective, "last-success|mth-last|any-of-last-m|multi-select");
    cmd.add_option("--m", o.m, "m for mth-last / last-m / ferguson");
    cmd.add_option("--M", o.M, "Selection chances for multi-select");
    cmd.add_option("--format", o.format, "table|json")->check(CLI::IsMember({"table", "json"}));
    cmd.add_option("--seed", o.seed, "Seed for every random stream (default: $STOPRULE_SEED, else 1)");
    cmd.add_option("--trials", o.trials, "Monte Carlo trials");
    cmd.add_option("--workers", o.workers, "Worker threads (0 = hardware concurrency)");
}

json list_json(const std::string& text)
{
    json a = json::array();
    for (double x : parse_number_list(text)) a.push_back(x);
    return a;
}

/// Builds the problem document from --problem or the inline flags and parses it strictly.
Problem build_problem(const Options& o, const std::string& command)
{
    json doc;
    if (!o.problem_file.empty()) {
        if (!o.model.empty() || !o.p.empty())
            throw InvalidInput("--problem cannot be combined with inline model flags");
        std::ifstream in(o.problem_file);
        if (!in) throw InvalidInput("cannot open problem file '" + o.problem_file + "'");
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw InvalidInput(std::string("problem file is not valid JSON: ") + e.what());
        }
    } else {
        std::string kind = o.model;
        if (kind.empty() && !o.p.empty()) kind = command == "lap" ? "lap" : "explicit-odds";
        if (kind.empty() && command == "lap") kind = "lap";
        if (kind.empty() && (o.alpha || !o.alphas.empty())) kind = "markov";
        if (kind.empty()) throw InvalidInput("no model given (use --model, --p or --problem)");

        json m{{"kind", kind}};
        if (kind == "explicit-odds") {
            m["p"] = list_json(o.p);
        } else if (kind == "secretary" || kind == "unknown-odds") {
            if (o.n) m["n"] = *o.n;
        } else if (kind == "dice") {
            if (o.n) m["n"] = *o.n;
            if (o.faces) m["faces"] = *o.faces;
        } else if (kind == "grouped") {
            m["sizes"] = list_json(o.sizes);
        } else if (kind == "time-embedded") {
            m["cond"] = list_json(o.cond);
            m["presence"] = list_json(o.presence);
        } else if (kind == "markov") {
            if (o.alpha) m["alpha"] = *o.alpha;
            if (o.beta) m["beta"] = *o.beta;
            if (o.N) m["N"] = *o.N;
            if (!o.alphas.empty()) m["alphas"] = list_json(o.alphas);
            if (!o.betas.empty()) m["betas"] = list_json(o.betas);
            if (o.rho) m["rho"] = *o.rho;
        } else if (kind == "tamaki-markov") {
            m["alphas"] = o.alphas.empty() ? json::array() : list_json(o.alphas);
            m["betas"] = o.betas.empty() ? json::array() : list_json(o.betas);
            if (o.rho) m["rho"] = *o.rho;
        } else if (kind == "lap") {
            if (o.rate) m["rate"] = *o.rate;
            if (o.thin_p) m["p"] = *o.thin_p;
            else if (!o.p.empty()) {
                const auto v = parse_number_list(o.p);
                if (v.size() != 1) throw InvalidInput("lap takes a single thinning probability");
                m["p"] = v.front();
            }
            if (o.horizon) m["T"] = *o.horizon;
        } else {
            m["kind"] = kind;  // rejected by parse_problem
        }
        doc = json{{"schema_version", kSchemaVersion}, {"model", m}};
        if (!o.avail.empty()) doc["availability"] = list_json(o.avail);
    }

    Problem pb = parse_problem(doc);
    if (!o.objective.empty()) {
        json obj{{"kind", o.objective}};
        if (o.objective == "multi-select" && o.M) obj["m"] = *o.M;
        else if (o.m) obj["m"] = *o.m;
        pb.objective = parse_objective(obj);
        pb.objective_given = true;
    }
    return pb;
}

std::uint64_t resolve_seed(const Options& o)
{
    if (o.seed) return *o.seed;
    if (const char* env = std::getenv("STOPRULE_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw InvalidInput("STOPRULE_SEED is not an unsigned integer");
    }
    return 1;
}

ojson report_json(const SimulationReport& r)
{
    return ojson{{"estimate", r.estimate}, {"std_error", r.std_error}, {"ci95", {r.ci95.lo, r.ci95.hi}},
                {"trials", r.trials},     {"wins", r.wins},           {"seed", r.seed}};
}

ojson phi_json(const MarkovPolicy& pol)
{
    ojson phi = ojson::array(), stops = ojson::array();
    for (std::size_t j = 0; j <= pol.N(); ++j) {
        phi.push_back(static_cast<int>(pol.phi[j]));
        if (pol.phi[j]) stops.push_back(j);
    }
    return ojson{{"phi", phi}, {"stopping_indices", stops}, {"islands", pol.islands()}};
}

// ---------------------------------------------------------------------------
// table rendering

std::string format_scalar(const ojson& v)
{
    if (v.is_number_float()) {
        char buf[64];
        const double x = v.get<double>();
        std::snprintf(buf, sizeof buf, x != 0.0 && std::abs(x) < 1e-4 ? "%.3e" : "%.6f", x);
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

void render_table(const ojson& obj, std::ostream& out, int indent = 0)
{
    std::size_t width = 0;
    for (const auto& [k, _] : obj.items()) width = std::max(width, k.size());
    for (const auto& [k, v] : obj.items()) {
        out << std::string(indent, ' ') << k;
        if (v.is_object()) {
            out << '\n';
            render_table(v, out, indent + 2);
            continue;
        }
        out << std::string(width - k.size() + 2, ' ');
        if (v.is_array()) {
            bool first = true;
            for (const auto& x : v) {
                if (!first) out << ", ";
                out << (x.is_object() || x.is_array() ? x.dump() : format_scalar(x));
                first = false;
            }
            out << '\n';
        } else {
            out << format_scalar(v) << '\n';
        }
    }
}

void emit(const Options& o, const ojson& result, std::ostream& out)
{
    if (o.format == "json") out << result.dump(2) << '\n';
    else render_table(result, out);
}

// ---------------------------------------------------------------------------
// subcommands

ojson cmd_threshold(const Options& o, const Problem& pb)
{
    if (pb.kind == "unknown-odds") {
        // no fixed threshold exists; report the plug-in recommendation for the prefix
        const auto obs = o.observations.empty() ? std::vector<double>{} : parse_number_list(o.observations);
        return ojson{{"command", "threshold"}, {"model", pb.kind}, {"n", pb.n},
                     {"recommendation", replay_recommendation(pb, obs)}};
    }
    const OddsSequence& seq = pb.require_odds();
    const ThresholdScan scan = threshold_scan(seq);
    const double v = win_probability(seq, scan.rule).value;
    const double from_s = tail_odds_sum(seq, scan.rule.s);
    const double total = tail_odds_sum(seq, 1);
    const OneOverEReport e = one_over_e_check(seq);
    ojson res{{"command", "threshold"},
             {"model", pb.kind},
             {"n", seq.size()},
             {"threshold", scan.rule.s},
             {"window", seq.size() - scan.rule.s + 1},
             {"win_probability", v},
             {"odds_sum_from_threshold", std::isfinite(from_s) ? ojson(from_s) : ojson()},
             {"total_odds", std::isfinite(total) ? ojson(total) : ojson()},
             {"infinite_odds", seq.has_infinite_odds()},
             {"one_over_e", {{"applicable", e.applicable}, {"margin", e.applicable ? ojson(e.margin) : ojson()}}}};
    if (!o.observations.empty()) res["recommendation"] = replay_recommendation(pb, parse_number_list(o.observations));
    return res;
}

ojson cmd_value(const Options& o, const Problem& pb)
{
    const OddsSequence& seq = pb.require_odds();
    const Objective& obj = pb.objective;
    obj.validate(seq.size());
    ThresholdRule rule = o.s ? ThresholdRule{*o.s} : threshold(seq);
    detail::require(rule.s >= 1 && rule.s <= seq.size(), "--s must lie in [1, n]");
    double value = 0.0;
    switch (obj.kind) {
    case ObjectiveKind::last_success: value = win_probability(seq, rule).value; break;
    case ObjectiveKind::mth_last: value = mth_last_value(seq, obj.m, rule).value; break;
    case ObjectiveKind::any_of_last_m: {
        const MultiOddsTable tab(seq, obj.m);
        double sum = 0.0;
        for (std::size_t j = 1; j <= obj.m; ++j) sum += tab.R(j, rule.s);
        value = tail_q_product(seq, rule.s) * sum;
        break;
    }
    case ObjectiveKind::multi_select: throw InvalidInput("value takes single-stop objectives; use multi-select");
    }
    return ojson{{"command", "value"}, {"objective", obj.name()}, {"threshold", rule.s}, {"win_probability", value}};
}

std::size_t require_m(const Options& o, const Problem& pb)
{
    if (o.m) return *o.m;
    if (pb.objective_given && pb.objective.kind != ObjectiveKind::last_success) return pb.objective.m;
    throw InvalidInput("--m is required");
}

ojson cmd_mth_last(const Options& o, const Problem& pb)
{
    const OddsSequence& seq = pb.require_odds();
    const std::size_t m = require_m(o, pb);
    const ThresholdRule rule = mth_last_threshold(seq, m);
    const ThresholdRule printed = mth_last_threshold_as_printed(seq, m);
    return ojson{{"command", "mth-last"},
                {"m", m},
                {"threshold", rule.s},
                {"win_probability", mth_last_value(seq, m, rule).value},
                {"threshold_as_printed", printed.s},
                {"win_probability_as_printed", mth_last_value(seq, m, printed).value}};
}

ojson cmd_last_m(const Options& o, const Problem& pb)
{
    const OddsSequence& seq = pb.require_odds();
    const std::size_t m = require_m(o, pb);
    return ojson{{"command", "last-m"},
                {"m", m},
                {"threshold", last_m_threshold(seq, m).s},
                {"win_probability", last_m_value(seq, m).value}};
}

ojson cmd_multi_select(const Options& o, const Problem& pb)
{
    const OddsSequence& seq = pb.require_odds();
    std::size_t M = o.M.value_or(0);
    if (!M && pb.objective.kind == ObjectiveKind::multi_select) M = pb.objective.m;
    if (!M) throw InvalidInput("--M is required");
    const MultiSelectRule rule = multi_select_rule(seq, M);
    ojson th = ojson::array();
    for (std::size_t c = 1; c <= M; ++c) th.push_back(rule.threshold(c));
    ojson res{{"command", "multi-select"}, {"M", M}, {"thresholds", th},
             {"win_convention", "some selected index is the last success"}};
    if (seq.size() <= kEnumerationCap)
        res["win_probability"] = enumerate_policy_value(seq, StoppingPolicy::multi(seq.size(), rule), Objective::multi_select(M));
    return res;
}

ojson cmd_markov(const Options& o, const Problem& pb)
{
    if (pb.tamaki) {
        const TamakiSpec& ts = *pb.tamaki;
        const auto check = o.no_assumption_check ? AssumptionCheck::skip : AssumptionCheck::enforce;
        const ThresholdRule rule = tamaki_markov_threshold(ts, check);
        const MarkovSpec back = ts.to_backward();
        ojson res{{"command", "markov"}, {"model", "tamaki-markov"}, {"n", ts.n()}, {"threshold", rule.s},
                 {"assumptions_hold", ts.assumption_failure().empty()},
                 {"win_probability", markov_policy_value(back, ts.backward_policy(rule)).value}};
        return res;
    }
    if (!pb.markov) throw InvalidInput("markov needs a markov or tamaki-markov model");
    const MarkovSpec spec = pb.markov->spec();
    const HyPolicy hp = pb.markov->homogeneous() ? hy_homogeneous_policy(*pb.markov->alpha, *pb.markov->beta, spec.N())
                                                 : hy_nonhomogeneous_policy(spec);
    ojson res{{"command", "markov"}, {"model", "markov"}, {"N", spec.N()}, {"rho", spec.rho()}, {"regime", hp.regime},
             {"r", hp.r ? ojson(*hp.r) : ojson()}, {"m", hp.m ? ojson(*hp.m) : ojson()},
             {"near_integer_floor", hp.near_integer_floor}};
    res.update(phi_json(hp.policy));
    res["win_probability"] = markov_policy_value(spec, hp.policy).value;
    return res;
}

ojson cmd_ferguson(const Options& o, const Problem* pb)
{
    SlaModel model;
    ojson res{{"command", "ferguson"}};
    if (!o.v_seq.empty() || !o.w_seq.empty()) {
        model.omega = o.omega;
        model.v_seq = parse_number_list(o.v_seq);
        model.w_seq = parse_number_list(o.w_seq);
        model.absorbed.assign(model.v_seq.size(), false);
        if (!o.absorbed.empty()) {
            const auto flags = parse_number_list(o.absorbed);
            detail::require(flags.size() == model.v_seq.size(), "--absorbed length must match --v");
            for (std::size_t i = 0; i < flags.size(); ++i) model.absorbed[i] = flags[i] != 0.0;
        }
        const SlaStop stop = one_sla_stop(model);
        res["stage"] = stop.stage;
        res["never_stopped"] = stop.never_stopped;
        res["payoff_if_never_stopped"] = model.omega;
    } else {
        if (!pb) throw InvalidInput("ferguson needs an odds model or --v/--w sequences");
        const OddsSequence& seq = pb->require_odds();
        const std::size_t m = require_m(o, *pb);
        model = bernoulli_sla_model(seq, m);
        const SlaStop stop = one_sla_stop(model);
        res["m"] = m;
        res["threshold"] = stop.stage;
        res["multiplicative_threshold"] = last_m_threshold(seq, m).s;
    }
    ojson ratios = ojson::array();
    for (std::size_t k = 0; k < model.horizon(); ++k)
        ratios.push_back(model.v_seq[k] > 0.0 ? ojson(model.w_seq[k] / model.v_seq[k]) : ojson());
    res["ratios"] = ratios;
    res["monotone"] = monotone_check(model);
    return res;
}

ojson cmd_lap(const Options& o, const Problem& pb, std::uint64_t seed)
{
    if (!pb.lap) throw InvalidInput("lap needs a lap model (--rate, --thin-p, --T)");
    const LapModel model{pb.lap->rate, pb.lap->thin_p};
    const double T = pb.lap->horizon;
    ojson res{{"command", "lap"}, {"rate", model.base_rate}, {"p", model.thin_p}, {"T", T}};
    if (!o.times.empty()) {
        const ArrivalTrace trace(parse_number_list(o.times), T);
        const LapOutcome outcome = lap_play(trace);
        res["stopped"] = outcome.stopped ? ojson(*outcome.stopped) : ojson();
        res["win"] = outcome.win;
        return res;
    }
    if (!o.grid.empty()) {
        const MartingaleReport rep = pi_martingale_check(model, parse_number_list(o.grid), o.trials, seed);
        res["check"] = "E[N~_t/t] = p*rate";
        res["grid"] = rep.grid;
        res["mean"] = rep.mean;
        res["z_score"] = rep.z_score;
        res["conditional_mean"] = rep.conditional_mean;
        res["expected"] = rep.expected;
        res["max_pairwise_deviation"] = rep.max_pairwise_deviation;
        res["max_pairwise_z"] = rep.max_pairwise_z;
        res["violations_4sigma"] = rep.violations_4sigma;
        res["passed_3sigma"] = rep.passed_3sigma;
        return res;
    }
    res["report"] = report_json(lap_win_estimate(model, T, o.trials, seed, o.workers));
    return res;
}

ojson cmd_simulate(const Options& o, const Problem& pb, std::uint64_t seed)
{
    if (pb.markov) {
        const MarkovSpec spec = pb.markov->spec();
        const HyPolicy hp = pb.markov->homogeneous() ? hy_homogeneous_policy(*pb.markov->alpha, *pb.markov->beta, spec.N())
                                                     : hy_nonhomogeneous_policy(spec);
        return ojson{{"command", "simulate"}, {"model", "markov"}, {"regime", hp.regime},
                    {"report", report_json(simulate(spec, hp.policy, o.trials, seed, o.workers))}};
    }
    const OddsSequence& seq = pb.require_odds();
    const Objective& obj = pb.objective;
    obj.validate(seq.size());
    const std::size_t n = seq.size();
    AnyPolicy policy;
    std::string described;
    if (o.policy == "empirical") {
        detail::require(obj.kind == ObjectiveKind::last_success, "the empirical policy targets the last success");
        policy = empirical_odds_policy(n);
        described = "empirical-odds";
    } else if (o.policy == "threshold") {
        if (!o.s) throw InvalidInput("--policy threshold needs --s");
        policy = StoppingPolicy::threshold(n, {*o.s});
        described = "threshold s=" + std::to_string(*o.s);
    } else if (o.policy == "optimal") {
        switch (obj.kind) {
        case ObjectiveKind::last_success: policy = StoppingPolicy::threshold(n, threshold(seq)); break;
        case ObjectiveKind::mth_last: policy = StoppingPolicy::threshold(n, mth_last_threshold(seq, obj.m)); break;
        case ObjectiveKind::any_of_last_m: policy = StoppingPolicy::threshold(n, last_m_threshold(seq, obj.m)); break;
        case ObjectiveKind::multi_select: policy = StoppingPolicy::multi(n, multi_select_rule(seq, obj.m)); break;
        }
        described = "optimal rule for " + obj.name();
    } else {
        throw InvalidInput("unknown --policy '" + o.policy + "'");
    }
    return ojson{{"command", "simulate"}, {"objective", obj.name()}, {"policy", described},
                {"report", report_json(simulate(seq, policy, obj, o.trials, seed, o.workers))}};
}

ojson cmd_oracle_check(const Problem& pb, bool& matched)
{
    ojson res{{"command", "oracle-check"}};
    if (pb.markov || pb.tamaki) {
        constexpr double tol = 1e-10;
        MarkovSpec spec = pb.markov ? pb.markov->spec() : pb.tamaki->to_backward();
        MarkovPolicy pol(spec.N());
        if (pb.markov) {
            pol = (pb.markov->homogeneous() ? hy_homogeneous_policy(*pb.markov->alpha, *pb.markov->beta, spec.N())
                                            : hy_nonhomogeneous_policy(spec)).policy;
        } else {
            pol = pb.tamaki->backward_policy(tamaki_markov_threshold(*pb.tamaki, AssumptionCheck::skip));
        }
        const double rule = markov_policy_value(spec, pol).value;
        const MarkovOracleResult dp = dp_optimal_markov(spec);
        matched = std::abs(rule - dp.optimal_value) <= tol;
        res.update(ojson{{"rule_value", rule}, {"oracle_value", dp.optimal_value},
                        {"difference", rule - dp.optimal_value}, {"tolerance", tol}, {"match", matched},
                        {"verdict", matched ? "match within 1e-10" : "MISMATCH beyond 1e-10"}});
        return res;
    }
    constexpr double tol = 1e-12;
    const OddsSequence& seq = pb.require_odds();
    const Objective& obj = pb.objective;
    obj.validate(seq.size());
    const std::size_t n = seq.size();
    StoppingPolicy rule;
    switch (obj.kind) {
    case ObjectiveKind::last_success: rule = StoppingPolicy::threshold(n, threshold(seq)); break;
    case ObjectiveKind::mth_last: rule = StoppingPolicy::threshold(n, mth_last_threshold(seq, obj.m)); break;
    case ObjectiveKind::any_of_last_m: rule = StoppingPolicy::threshold(n, last_m_threshold(seq, obj.m)); break;
    case ObjectiveKind::multi_select: rule = StoppingPolicy::multi(n, multi_select_rule(seq, obj.m)); break;
    }
    const double value = enumerate_policy_value(seq, rule, obj);
    const OracleResult dp = dp_optimal(seq, obj);
    matched = std::abs(value - dp.optimal_value) <= tol;
    res.update(ojson{{"objective", obj.name()}, {"rule_value", value}, {"oracle_value", dp.optimal_value},
                    {"difference", value - dp.optimal_value}, {"tolerance", tol}, {"match", matched},
                    {"verdict", matched ? "match within 1e-12" : "MISMATCH beyond 1e-12"}});
    return res;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Optimal stopping on the last success: sum-the-odds rules, oracles and simulation", "stoprule"};
    app.require_subcommand(1);
    Options o;

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"threshold", "Sum-the-odds threshold and win probability"},
        {"value", "Win probability of a given threshold rule"},
        {"mth-last", "Stop on the m-th last success"},
        {"last-m", "Stop on any of the last m successes"},
        {"multi-select", "Multiple selection chances (H-table thresholds)"},
        {"markov", "Markov-dependent indicators (Hsiao-Yang, Tamaki)"},
        {"ferguson", "One-stage look-ahead rule"},
        {"lap", "Continuous-time last-arrival problem"},
        {"simulate", "Monte Carlo estimate of a policy"},
        {"oracle-check", "Compare the closed-form rule against the exact oracle"},
        {"serve", "Run the advisor HTTP service"},
    };
    std::map<std::string, CLI::App*> cmds;
    for (const auto& s : subs) {
        CLI::App* c = app.add_subcommand(s.name, s.help);
        add_model_options(*c, o);
        cmds[s.name] = c;
    }
    cmds["threshold"]->add_option("--observations", o.observations, "Recorded indicators 0/1 for a live recommendation");
    cmds["value"]->add_option("--s", o.s, "Threshold index (default: the optimal one)");
    cmds["simulate"]->add_option("--policy", o.policy, "optimal|threshold|empirical");
    cmds["simulate"]->add_option("--s", o.s, "Threshold for --policy threshold");
    cmds["markov"]->add_flag("--no-assumption-check", o.no_assumption_check, "Evaluate Tamaki's threshold even if its hypotheses fail");
    cmds["lap"]->add_option("--times", o.times, "Play the rule on these arrival times");
    cmds["lap"]->add_option("--grid", o.grid, "Run the proportional-increments check on this time grid");
    cmds["ferguson"]->add_option("--v", o.v_seq, "V_k sequence for a general model");
    cmds["ferguson"]->add_option("--w", o.w_seq, "W_k sequence for a general model");
    cmds["ferguson"]->add_option("--omega", o.omega, "Payoff when absorbed before predicting");
    cmds["ferguson"]->add_option("--absorbed", o.absorbed, "0/1 absorption flags per stage");
    cmds["serve"]->add_option("--host", o.host, "Loopback address to bind");
    cmds["serve"]->add_option("--port", o.port, "Port (0 picks a free one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "serve") {
            if (o.host != "127.0.0.1" && o.host != "localhost" && o.host != "::1")
                throw InvalidInput("serve binds loopback addresses only");
            AdvisorServer server;
            const bool ok = server.run(o.host, o.port, [&](int port) {
                out << "listening on http://" << o.host << ':' << port << std::endl;
            });
            if (!ok) throw InvalidInput("cannot bind " + o.host + ":" + std::to_string(o.port));
            return kExitOk;
        }

        const std::uint64_t seed = resolve_seed(o);
        if (name == "ferguson" && (!o.v_seq.empty() || !o.w_seq.empty())) {
            emit(o, cmd_ferguson(o, nullptr), out);
            return kExitOk;
        }
        const Problem pb = build_problem(o, name);
        ojson result;
        int code = kExitOk;
        if (name == "threshold") result = cmd_threshold(o, pb);
        else if (name == "value") result = cmd_value(o, pb);
        else if (name == "mth-last") result = cmd_mth_last(o, pb);
        else if (name == "last-m") result = cmd_last_m(o, pb);
        else if (name == "multi-select") result = cmd_multi_select(o, pb);
        else if (name == "markov") result = cmd_markov(o, pb);
        else if (name == "ferguson") result = cmd_ferguson(o, &pb);
        else if (name == "lap") result = cmd_lap(o, pb, seed);
        else if (name == "simulate") result = cmd_simulate(o, pb, seed);
        else if (name == "oracle-check") {
            bool matched = false;
            result = cmd_oracle_check(pb, matched);
            if (!matched) code = kExitCheckFailed;
        }
        emit(o, result, out);
        return code;
    } catch (const GuardExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitGuard;
    } catch (const AssumptionViolation& e) {
        err << "error: model assumption violated: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const DomainError& e) {
        err << "error: model assumption violated: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::logic_error& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitGuard;
    }
}

}  // namespace stoprule::cli
