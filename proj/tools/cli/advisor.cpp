#include "advisor.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

#include <stoprule/errors.hpp>

namespace stoprule::cli {

AdvisorSession::AdvisorSession(std::optional<OddsSequence> seq, std::size_t n) : seq_(std::move(seq)), n_(n) {}

AdvisorSession::AdvisorSession(OddsSequence seq) : AdvisorSession(std::optional<OddsSequence>(seq), seq.size()) {}

AdvisorSession AdvisorSession::unknown_odds(std::size_t n)
{
    detail::require(n >= 1, "session horizon must be >= 1");
    return AdvisorSession(std::nullopt, n);
}

AdvisorSession AdvisorSession::from_problem(const Problem& pb)
{
    if (pb.kind == "unknown-odds") return unknown_odds(pb.n);
    if (!pb.odds) throw InvalidInput("advisor sessions need an odds model or unknown-odds");
    return AdvisorSession(*pb.odds);
}

void AdvisorSession::observe(bool success)
{
    if (history_.size() >= n_)
        throw InvalidInput("observation past the horizon n = " + std::to_string(n_));
    history_.push_back(success ? 1 : 0);
}

json AdvisorSession::recommendation() const
{
    const std::size_t k = index();
    const bool at_success = k >= 1 && history_.back() != 0;

    // The model in force for the indices still to come: the known odds, or a
    // constant sequence at the current plug-in estimate.
    OddsSequence model;
    std::size_t threshold_index = 0;
    bool stop = false;
    if (seq_) {
        model = *seq_;
        threshold_index = threshold(model).s;
        stop = at_success && k >= threshold_index;
    } else {
        const EmpiricalOddsPolicy emp(n_);
        const auto successes = std::count(history_.begin(), history_.end(), std::uint8_t{1});
        const double p_now = (1.0 + static_cast<double>(successes)) / (static_cast<double>(k) + 2.0);
        model = OddsSequence(std::vector<double>(n_, p_now));
        if (at_success) {
            threshold_index = emp.window_start(k, history_);
            stop = emp.stop_at_success(k, history_);
        } else {
            threshold_index = k < n_ ? emp.window_start(k + 1, history_) : n_;
        }
    }

    double win_if_stop = 0.0;
    if (at_success) {
        win_if_stop = 1.0;
        for (std::size_t i = k + 1; i <= n_; ++i) win_if_stop *= model.q(i);
    }
    double win_if_continue = 0.0;
    if (k < n_) {
        const std::size_t from = std::max(threshold(model).s, k + 1);
        win_if_continue = win_probability(model, {from}).value;
    }

    return json{{"schema_version", kSchemaVersion},
                {"action", stop ? "stop" : "continue"},
                {"threshold", threshold_index},
                {"win_if_stop", win_if_stop},
                {"win_if_continue_estimate", win_if_continue},
                {"index", k},
                {"n", n_},
                {"finished", k >= n_},
                {"mode", seq_ ? "known-odds" : "unknown-odds"}};
}

json AdvisorSession::summary() const
{
    json j{{"n", n_}, {"mode", seq_ ? "known-odds" : "unknown-odds"}};
    if (seq_) {
        const auto rule = threshold(*seq_);
        j["threshold"] = rule.s;
        j["win_probability"] = win_probability(*seq_, rule).value;
    }
    return j;
}

json replay_recommendation(const Problem& pb, const std::vector<double>& observations)
{
    AdvisorSession session = AdvisorSession::from_problem(pb);
    for (double x : observations) {
        detail::require(x == 0.0 || x == 1.0, "observations must be 0 or 1");
        session.observe(x == 1.0);
    }
    return session.recommendation();
}

// ---------------------------------------------------------------------------
// HTTP service

namespace {

struct SessionSlot {
    std::mutex mu;  // single writer per session
    AdvisorSession session;
    explicit SessionSlot(AdvisorSession s) : session(std::move(s)) {}
};

void send_json(httplib::Response& res, int status, json body)
{
    body["schema_version"] = kSchemaVersion;
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message)
{
    send_json(res, status, json{{"error", {{"code", code}, {"message", message}}}});
}

/// Accepts {"success": bool}, {"record": bool} or {"value": 0|1}.
bool parse_observation(const json& body)
{
    if (!body.is_object() || body.size() != 1) throw InvalidInput("observation body needs exactly one field");
    if (body.contains("success") && body["success"].is_boolean()) return body["success"].get<bool>();
    if (body.contains("record") && body["record"].is_boolean()) return body["record"].get<bool>();
    if (body.contains("value") && body["value"].is_number_integer()) {
        const auto v = body["value"].get<long long>();
        if (v == 0 || v == 1) return v == 1;
    }
    throw InvalidInput("observation must be {\"success\": bool}, {\"record\": bool} or {\"value\": 0|1}");
}

}  // namespace

struct AdvisorServer::Impl {
    httplib::Server server;
    std::mutex registry_mu;
    std::unordered_map<std::string, std::shared_ptr<SessionSlot>> sessions;
    std::uint64_t next_id = 1;
    std::thread worker;

    std::shared_ptr<SessionSlot> find(const std::string& id)
    {
        std::lock_guard lock(registry_mu);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    Impl()
    {
        server.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const json body = json::parse(req.body);
                AdvisorSession session = AdvisorSession::from_problem(parse_problem(body));
                json out{{"model", session.summary()}};
                std::string id;
                {
                    std::lock_guard lock(registry_mu);
                    id = "s" + std::to_string(next_id++);
                    sessions.emplace(id, std::make_shared<SessionSlot>(std::move(session)));
                }
                out["session_id"] = id;
                send_json(res, 201, out);
            } catch (const json::exception& e) {
                send_error(res, 400, "malformed", e.what());
            } catch (const std::exception& e) {
                send_error(res, 400, "invalid", e.what());
            }
        });

        server.Post(R"(/session/([A-Za-z0-9]+)/observe)", [this](const httplib::Request& req, httplib::Response& res) {
            auto slot = find(req.matches[1]);
            if (!slot) return send_error(res, 404, "unknown-session", "no session " + std::string(req.matches[1]));
            try {
                const bool success = parse_observation(json::parse(req.body));
                std::lock_guard lock(slot->mu);
                if (slot->session.index() >= slot->session.horizon())
                    return send_error(res, 409, "past-horizon", "all n observations are already recorded");
                slot->session.observe(success);
                send_json(res, 200, json{{"accepted", true}, {"index", slot->session.index()}});
            } catch (const json::exception& e) {
                send_error(res, 400, "malformed", e.what());
            } catch (const std::exception& e) {
                send_error(res, 400, "invalid", e.what());
            }
        });

        server.Get(R"(/session/([A-Za-z0-9]+)/recommendation)", [this](const httplib::Request& req, httplib::Response& res) {
            auto slot = find(req.matches[1]);
            if (!slot) return send_error(res, 404, "unknown-session", "no session " + std::string(req.matches[1]));
            std::lock_guard lock(slot->mu);
            send_json(res, 200, slot->session.recommendation());
        });

        server.Delete(R"(/session/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::size_t erased = 0;
            {
                std::lock_guard lock(registry_mu);
                erased = sessions.erase(req.matches[1]);
            }
            if (!erased) return send_error(res, 404, "unknown-session", "no session " + std::string(req.matches[1]));
            send_json(res, 200, json{{"deleted", true}});
        });
    }
};

AdvisorServer::AdvisorServer() : impl_(std::make_unique<Impl>()) {}

AdvisorServer::~AdvisorServer() { stop(); }

int AdvisorServer::start(const std::string& host, int port)
{
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) return -1;
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool AdvisorServer::run(const std::string& host, int port, const std::function<void(int)>& on_bound)
{
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) return false;
    if (on_bound) on_bound(bound);
    return impl_->server.listen_after_bind();
}

void AdvisorServer::stop()
{
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace stoprule::cli
