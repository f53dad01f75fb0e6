#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtwin/backplane/switch_table.hpp"
#include "dtwin/backplane/transport.hpp"
#include "dtwin/error.hpp"
#include "dtwin/wire/mac_address.hpp"

namespace dtwin::backplane {

struct RosterEntry {
    std::string name;
    wire::MacAddress mac;
    friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

struct SessionConfig {
    std::uint64_t dt_ns = 10'000'000;
    std::uint64_t total_steps = 0;
    /// Port ids are roster indices, independent of join order.
    std::vector<RosterEntry> roster;
    std::chrono::milliseconds barrier_timeout{30'000};
    std::chrono::milliseconds join_timeout{30'000};

    /// Throws ValidationError (empty roster, duplicate names/MACs, multicast MACs).
    void validate() const;
};

struct SessionReport {
    std::uint64_t steps = 0;
    std::uint64_t dt_ns = 0;
    std::uint64_t sim_time_ns = 0;
    std::map<std::string, std::uint64_t> frames_by_schema;
    RouteStats routing;
    /// Frames rejected at decode (FCS mismatch or truncation).
    std::uint64_t dropped_frames = 0;
    double wall_clock_s = 0.0;
    /// Fully resolved configuration the session ran with, filled by the harness.
    std::string resolved_config;

    nlohmann::json to_json() const;
};

/// Hooks invoked from the backplane's single event loop, in protocol order.
class SessionObserver {
public:
    virtual ~SessionObserver() = default;
    virtual void on_grant(PortId /*port*/, std::uint64_t /*step*/) {}
    virtual void on_done(PortId /*port*/, std::uint64_t /*step*/) {}
    /// Frames accepted during `step`, already in delivery order (ingress, seq).
    virtual void on_step_frames(std::uint64_t /*step*/, std::span<const SentFrame> /*frames*/) {}
    virtual void on_finished(const SessionReport& /*report*/) {}
    /// `completed_steps` steps finished before the failure.
    virtual void on_aborted(std::uint64_t /*completed_steps*/, const Error& /*error*/) {}
};

/// Lock-step orchestrator: gates start on the full roster, then for every step
/// k sends GRANT(k) to all clients, waits for DONE(k) from all of them, and
/// routes the frames sent during k into the GRANT(k+1) inboxes.
class Backplane {
public:
    explicit Backplane(SessionConfig config);

    void add_observer(SessionObserver* observer) { observers_.push_back(observer); }

    /// Runs the whole session. Throws ClientTimeout, RosterMismatch,
    /// ProtocolError or TransportError; observers see on_aborted first.
    SessionReport run(Listener& listener);

    const SessionConfig& config() const noexcept { return config_; }

private:
    SessionConfig config_;
    std::vector<SessionObserver*> observers_;
};

/// Convenience wrapper: listens on `endpoint` over TCP and runs one session.
SessionReport run_session(const SessionConfig& config, const Endpoint& endpoint,
                          std::span<SessionObserver* const> observers = {});

}  // namespace dtwin::backplane
