#pragma once
// Live stop/continue advice over an observation stream, and the loopback
// HTTP service that hosts advisor sessions.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include <stoprule/montecarlo.hpp>
#include <stoprule/odds.hpp>

#include "problem.hpp"

namespace stoprule::cli {

/// One observation stream. Known-odds sessions use the sum-the-odds threshold;
/// unknown-odds sessions use the empirical plug-in rule.
class AdvisorSession {
public:
    explicit AdvisorSession(OddsSequence seq);
    static AdvisorSession unknown_odds(std::size_t n);
    static AdvisorSession from_problem(const Problem& pb);

    std::size_t horizon() const { return n_; }
    std::size_t index() const { return history_.size(); }

    /// Records the indicator at index() + 1; InvalidInput past the horizon.
    void observe(bool success);

    json recommendation() const;
    json summary() const;

private:
    AdvisorSession(std::optional<OddsSequence> seq, std::size_t n);

    std::optional<OddsSequence> seq_;
    std::size_t n_;
    std::vector<std::uint8_t> history_;
};

/// Batch answer for a model and a recorded prefix, as used by `threshold --observations`.
json replay_recommendation(const Problem& pb, const std::vector<double>& observations);

/// HTTP/1.1 JSON service on a loopback address.
class AdvisorServer {
public:
    AdvisorServer();
    ~AdvisorServer();
    AdvisorServer(const AdvisorServer&) = delete;
    AdvisorServer& operator=(const AdvisorServer&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread; returns the port.
    int start(const std::string& host, int port);
    /// Binds and serves on the calling thread until stop().
    bool run(const std::string& host, int port, const std::function<void(int)>& on_bound);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace stoprule::cli
