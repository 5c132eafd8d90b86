#include "problem.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <stoprule/errors.hpp>
#include <stoprule/lap.hpp>

namespace stoprule::cli {

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) throw InvalidInput(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw InvalidInput("unknown field '" + key + "' in " + where);
    }
}

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key)) throw InvalidInput(where + " is missing required field '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidInput("field '" + key + "' in " + where + " has the wrong type");
    }
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key)) throw InvalidInput(where + " is missing required field '" + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw InvalidInput("field '" + key + "' in " + where + " must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> get_list(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.contains(key) ? obj.at(key) : json();
    if (!v.is_array()) throw InvalidInput("field '" + key + "' in " + where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw InvalidInput("field '" + key + "' in " + where + " must contain numbers only");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

MarkovSpec MarkovParams::spec() const
{
    if (homogeneous()) return MarkovSpec::homogeneous(*alpha, *beta, N, rho);
    return MarkovSpec(alphas, betas, rho);
}

const OddsSequence& Problem::require_odds() const
{
    if (!odds) throw InvalidInput("model kind '" + kind + "' does not define an odds sequence");
    return *odds;
}

Objective parse_objective(const json& obj)
{
    reject_unknown(obj, {"kind", "m"}, "objective");
    const auto kind = get_field<std::string>(obj, "kind", "objective");
    if (kind == "last-success") {
        if (obj.contains("m")) throw InvalidInput("objective 'last-success' takes no 'm'");
        return Objective::last_success();
    }
    if (!obj.contains("m")) throw InvalidInput("objective '" + kind + "' needs field 'm'");
    const std::size_t m = get_count(obj, "m", "objective");
    if (kind == "mth-last") return Objective::mth_last(m);
    if (kind == "any-of-last-m") return Objective::any_of_last_m(m);
    if (kind == "multi-select") return Objective::multi_select(m);
    throw InvalidInput("unknown objective kind '" + kind + "'");
}

Problem parse_problem(const json& doc)
{
    reject_unknown(doc, {"schema_version", "model", "objective", "availability"}, "problem");
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer())
        throw InvalidInput("problem is missing integer field 'schema_version'");
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
        throw InvalidInput("unsupported schema_version " + doc.at("schema_version").dump()
                           + " (this build reads version " + std::to_string(kSchemaVersion) + ")");
    if (!doc.contains("model")) throw InvalidInput("problem is missing required field 'model'");

    const json& m = doc.at("model");
    if (!m.is_object()) throw InvalidInput("model must be an object");
    Problem pb;
    pb.kind = get_field<std::string>(m, "kind", "model");
    const std::string where = "model '" + pb.kind + "'";

    if (pb.kind == "explicit-odds") {
        reject_unknown(m, {"kind", "p"}, where);
        pb.odds = OddsSequence(get_list(m, "p", where));
    } else if (pb.kind == "secretary") {
        reject_unknown(m, {"kind", "n"}, where);
        pb.odds = secretary(get_count(m, "n", where));
    } else if (pb.kind == "dice") {
        reject_unknown(m, {"kind", "n", "faces"}, where);
        pb.odds = dice(get_count(m, "n", where), m.contains("faces") ? get_count(m, "faces", where) : 6);
    } else if (pb.kind == "grouped") {
        reject_unknown(m, {"kind", "sizes"}, where);
        std::vector<std::size_t> sizes;
        for (double x : get_list(m, "sizes", where)) {
            if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x)))
                throw InvalidInput("group sizes must be non-negative integers");
            sizes.push_back(static_cast<std::size_t>(x));
        }
        pb.odds = grouped(sizes);
    } else if (pb.kind == "time-embedded") {
        reject_unknown(m, {"kind", "cond", "presence"}, where);
        pb.odds = time_embedded(get_list(m, "cond", where), get_list(m, "presence", where));
    } else if (pb.kind == "unknown-odds") {
        reject_unknown(m, {"kind", "n"}, where);
        pb.n = get_count(m, "n", where);
        detail::require(pb.n >= 1, "unknown-odds needs n >= 1");
    } else if (pb.kind == "markov") {
        reject_unknown(m, {"kind", "alpha", "beta", "N", "alphas", "betas", "rho"}, where);
        MarkovParams mp;
        if (m.contains("rho")) mp.rho = get_field<double>(m, "rho", where);
        const bool hom = m.contains("alpha") || m.contains("beta") || m.contains("N");
        const bool gen = m.contains("alphas") || m.contains("betas");
        if (hom == gen) throw InvalidInput(where + " needs either alpha/beta/N or alphas/betas");
        if (hom) {
            mp.alpha = get_field<double>(m, "alpha", where);
            mp.beta = get_field<double>(m, "beta", where);
            mp.N = get_count(m, "N", where);
        } else {
            mp.alphas = get_list(m, "alphas", where);
            mp.betas = get_list(m, "betas", where);
        }
        (void)mp.spec();  // validates ranges and lengths
        pb.markov = mp;
    } else if (pb.kind == "tamaki-markov") {
        reject_unknown(m, {"kind", "alphas", "betas", "rho"}, where);
        pb.tamaki = TamakiSpec(get_list(m, "alphas", where), get_list(m, "betas", where),
                               m.contains("rho") ? get_field<double>(m, "rho", where) : 0.5);
    } else if (pb.kind == "lap") {
        reject_unknown(m, {"kind", "rate", "p", "T"}, where);
        LapParams lp;
        if (m.contains("rate")) lp.rate = get_field<double>(m, "rate", where);
        if (m.contains("p")) lp.thin_p = get_field<double>(m, "p", where);
        lp.horizon = get_field<double>(m, "T", where);
        LapModel{lp.rate, lp.thin_p}.validate();
        detail::require(lp.horizon > 0.0, "lap horizon T must be positive");
        pb.lap = lp;
    } else {
        throw InvalidInput("unknown model kind '" + pb.kind + "'");
    }

    if (doc.contains("availability")) {
        if (!pb.odds) throw InvalidInput("availability applies to odds models only");
        pb.odds = with_availability(*pb.odds, get_list(doc, "availability", "problem"));
    }
    if (doc.contains("objective")) {
        pb.objective = parse_objective(doc.at("objective"));
        pb.objective_given = true;
    }
    return pb;
}

Problem load_problem_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open problem file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("problem file is not valid JSON: ") + e.what());
    }
    return parse_problem(doc);
}

std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput("'" + item + "' is not a number");
        }
    }
    if (out.empty()) throw InvalidInput("empty number list");
    return out;
}

}  // namespace stoprule::cli
