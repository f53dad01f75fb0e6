#include "dtwin/backplane/session.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dtwin/backplane/protocol.hpp"
#include "dtwin/backplane/sim_clock.hpp"
#include "dtwin/wire/payload.hpp"

namespace dtwin::backplane {

namespace {

std::string schema_name(const wire::EthernetFrame& f) {
    if (f.ethertype != wire::kEtherTypeDigitalTwin || f.payload.empty()) return "unknown";
    switch (static_cast<wire::SchemaId>(f.payload[0])) {
        case wire::SchemaId::VehicleTelemetry: return "vehicle_telemetry";
        case wire::SchemaId::SteeringCommand: return "steering_command";
        case wire::SchemaId::SpeedCommand: return "speed_command";
        case wire::SchemaId::CameraFragment: return "camera_fragment";
        case wire::SchemaId::DetectionReport: return "detection_report";
    }
    return "unknown";
}

struct Event {
    PortId port = 0;
    bool closed = false;
    std::vector<std::uint8_t> body;
};

// Transport threads push, the session loop pops. Order across ports does not
// matter: the loop only ever acts on a complete DONE set.
class EventQueue {
public:
    void push(Event e) {
        {
            std::lock_guard lock(mu_);
            queue_.push_back(std::move(e));
        }
        cv_.notify_one();
    }

    std::optional<Event> pop(SteadyClock::time_point deadline) {
        std::unique_lock lock(mu_);
        if (!cv_.wait_until(lock, deadline, [&] { return !queue_.empty(); })) return std::nullopt;
        Event e = std::move(queue_.front());
        queue_.pop_front();
        return e;
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Event> queue_;
};

ByeReason bye_reason_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ClientTimeout: return ByeReason::Timeout;
        case ErrorKind::RosterMismatch: return ByeReason::RosterMismatch;
        case ErrorKind::ProtocolError: return ByeReason::ProtocolError;
        default: return ByeReason::Aborted;
    }
}

void send_quietly(Connection& conn, const ControlMessage& msg) noexcept {
    try {
        conn.send(encode_message(msg));
    } catch (...) {
        // Peer already gone.
    }
}

class SessionRun {
public:
    SessionRun(const SessionConfig& config, std::span<SessionObserver* const> observers)
        : config_(config), observers_(observers), clock_(config.dt_ns), table_(config.roster.size()),
          conns_(config.roster.size()) {}

    ~SessionRun() { stop_readers(); }

    SessionReport run(Listener& listener) {
        const auto started = SteadyClock::now();
        report_.dt_ns = config_.dt_ns;
        try {
            join(listener);
            start_readers();
            step_loop();
        } catch (const Error& e) {
            for (auto* o : observers_) o->on_aborted(clock_.step_index(), e);
            const Bye bye{bye_reason_for(e.kind())};
            for (auto& c : conns_) {
                if (c) send_quietly(*c, bye);
            }
            stop_readers();
            throw;
        }
        for (auto& c : conns_) send_quietly(*c, Bye{ByeReason::Finished});
        stop_readers();

        report_.steps = clock_.step_index();
        report_.sim_time_ns = clock_.sim_time_ns();
        report_.wall_clock_s = std::chrono::duration<double>(SteadyClock::now() - started).count();
        for (auto* o : observers_) o->on_finished(report_);
        return report_;
    }

private:
    std::size_t n() const { return config_.roster.size(); }

    void join(Listener& listener) {
        const auto deadline = SteadyClock::now() + config_.join_timeout;
        std::size_t joined = 0;
        std::string rejection;
        while (joined < n()) {
            auto conn = listener.accept(deadline);
            if (!conn) {
                const std::string msg =
                    fmt::format("{} of {} clients joined before the deadline{}", joined, n(),
                                rejection.empty() ? "" : "; last rejection: " + rejection);
                throw Error(rejection.empty() ? ErrorKind::ClientTimeout : ErrorKind::RosterMismatch, msg);
            }
            const Received r = conn->receive(deadline);
            if (r.status != RecvStatus::Message) continue;

            ControlMessage msg;
            try {
                msg = decode_message(r.body);
            } catch (const Error&) {
                send_quietly(*conn, Bye{ByeReason::ProtocolError});
                continue;
            }
            const auto* hello = std::get_if<Hello>(&msg);
            if (!hello) {
                send_quietly(*conn, Bye{ByeReason::ProtocolError});
                continue;
            }
            const auto it = std::find_if(config_.roster.begin(), config_.roster.end(),
                                         [&](const RosterEntry& e) { return e.name == hello->name; });
            if (it == config_.roster.end() || it->mac != hello->mac) {
                rejection = fmt::format("'{}' ({}) is not in the roster", hello->name, hello->mac.to_string());
                send_quietly(*conn, Bye{ByeReason::RosterMismatch});
                continue;
            }
            const auto port = static_cast<PortId>(it - config_.roster.begin());
            if (conns_[port]) {
                send_quietly(*conn, Bye{ByeReason::Refused});
                continue;
            }
            conn->send(encode_message(HelloAck{port, config_.dt_ns, config_.total_steps}));
            conns_[port] = std::move(conn);
            ++joined;
        }
    }

    void start_readers() {
        for (PortId p = 0; p < n(); ++p) {
            readers_.emplace_back([this, p, conn = conns_[p].get()] {
                for (;;) {
                    Received r;
                    try {
                        r = conn->receive(SteadyClock::now() + std::chrono::hours(1));
                    } catch (const Error&) {
                        r.status = RecvStatus::Closed;
                    }
                    if (r.status == RecvStatus::Timeout) continue;
                    if (r.status != RecvStatus::Message) {
                        events_.push(Event{p, true, {}});
                        return;
                    }
                    events_.push(Event{p, false, std::move(r.body)});
                }
            });
        }
    }

    void stop_readers() noexcept {
        for (auto& c : conns_) {
            if (c) c->close();
        }
        for (auto& t : readers_) {
            if (t.joinable()) t.join();
        }
        readers_.clear();
    }

    void step_loop() {
        std::vector<std::vector<std::vector<std::uint8_t>>> inboxes(n());
        while (clock_.step_index() < config_.total_steps) {
            const std::uint64_t k = clock_.step_index();
            for (PortId p = 0; p < n(); ++p) {
                for (auto* o : observers_) o->on_grant(p, k);
                try {
                    conns_[p]->send(encode_message(Grant{k, std::move(inboxes[p])}));
                } catch (const Error& e) {
                    throw Error(ErrorKind::ClientTimeout,
                                fmt::format("client '{}' departed at step {}: {}", config_.roster[p].name, k, e.what()));
                }
                inboxes[p].clear();
            }
            auto done = collect_done(k);
            inboxes = advance_barrier(k, std::move(done));
        }
    }

    std::vector<std::vector<std::vector<std::uint8_t>>> collect_done(std::uint64_t k) {
        std::vector<std::optional<std::vector<std::vector<std::uint8_t>>>> done(n());
        std::size_t pending = n();
        const auto deadline = SteadyClock::now() + config_.barrier_timeout;
        while (pending > 0) {
            auto ev = events_.pop(deadline);
            if (!ev) {
                std::vector<std::string> missing;
                for (PortId p = 0; p < n(); ++p) {
                    if (!done[p]) missing.push_back(config_.roster[p].name);
                }
                throw Error(ErrorKind::ClientTimeout,
                            fmt::format("no DONE({}) from {} within {} ms", k, fmt::join(missing, ", "),
                                        config_.barrier_timeout.count()));
            }
            const std::string& who = config_.roster[ev->port].name;
            if (ev->closed) {
                // A client may hang up right after its last DONE.
                if (done[ev->port] && k + 1 == config_.total_steps) continue;
                throw Error(ErrorKind::ClientTimeout, fmt::format("client '{}' departed at step {}", who, k));
            }
            ControlMessage msg = decode_message(ev->body);
            if (std::holds_alternative<Bye>(msg)) {
                throw Error(ErrorKind::ClientTimeout, fmt::format("client '{}' said BYE at step {}", who, k));
            }
            auto* d = std::get_if<Done>(&msg);
            if (!d) throw Error(ErrorKind::ProtocolError, fmt::format("client '{}' sent a non-DONE message", who));
            if (d->step != k || done[ev->port]) {
                throw Error(ErrorKind::ProtocolError,
                            fmt::format("client '{}' sent DONE({}) while the barrier is at step {}", who, d->step, k));
            }
            for (auto* o : observers_) o->on_done(ev->port, k);
            done[ev->port] = std::move(d->frames);
            --pending;
        }
        std::vector<std::vector<std::vector<std::uint8_t>>> out(n());
        for (PortId p = 0; p < n(); ++p) out[p] = std::move(*done[p]);
        return out;
    }

    // Every DONE(k) is in hand: route step k's frames and advance the clock.
    std::vector<std::vector<std::vector<std::uint8_t>>> advance_barrier(
        std::uint64_t k, std::vector<std::vector<std::vector<std::uint8_t>>> done) {
        std::vector<SentFrame> sent;
        for (PortId p = 0; p < n(); ++p) {
            for (std::size_t i = 0; i < done[p].size(); ++i) {
                try {
                    SentFrame f{p, static_cast<std::uint32_t>(i), wire::decode_frame(done[p][i])};
                    ++report_.frames_by_schema[schema_name(f.frame)];
                    sent.push_back(std::move(f));
                } catch (const Error&) {
                    ++report_.dropped_frames;
                }
            }
        }
        for (auto* o : observers_) o->on_step_frames(k, sent);

        auto routed = switch_route(std::move(sent), table_, &report_.routing);
        std::vector<std::vector<std::vector<std::uint8_t>>> inboxes(n());
        for (PortId p = 0; p < n(); ++p) {
            inboxes[p].reserve(routed[p].size());
            for (const auto& f : routed[p]) inboxes[p].push_back(wire::encode_frame(f));
        }
        clock_.advance();
        return inboxes;
    }

    const SessionConfig& config_;
    std::span<SessionObserver* const> observers_;
    SimClock clock_;
    SwitchTable table_;
    std::vector<std::unique_ptr<Connection>> conns_;
    std::vector<std::thread> readers_;
    EventQueue events_;
    SessionReport report_;
};

}  // namespace

void SessionConfig::validate() const {
    std::vector<std::string> problems;
    if (dt_ns == 0) problems.emplace_back("dt must be positive");
    if (roster.empty()) problems.emplace_back("roster is empty");
    if (roster.size() > 0xFFFF) problems.emplace_back("roster larger than 65535 ports");
    std::set<std::string> names;
    std::set<wire::MacAddress> macs;
    for (const auto& e : roster) {
        if (!names.insert(e.name).second) problems.push_back(fmt::format("duplicate client name '{}'", e.name));
        if (!macs.insert(e.mac).second) problems.push_back(fmt::format("duplicate MAC {}", e.mac.to_string()));
        if (e.mac.is_multicast()) problems.push_back(fmt::format("client '{}' has a multicast MAC", e.name));
    }
    if (!problems.empty()) throw Error(ErrorKind::ValidationError, fmt::format("{}", fmt::join(problems, "; ")));
}

nlohmann::json SessionReport::to_json() const {
    nlohmann::json j;
    j["steps"] = steps;
    j["dt_ns"] = dt_ns;
    j["sim_time_ns"] = sim_time_ns;
    j["frames_by_schema"] = frames_by_schema;
    j["routing"] = {{"frames_in", routing.frames_in},
                    {"unicast", routing.unicast},
                    {"broadcast_copies", routing.broadcast_copies},
                    {"flood_copies", routing.flood_copies},
                    {"filtered", routing.filtered}};
    j["dropped_frames"] = dropped_frames;
    j["wall_clock_s"] = wall_clock_s;
    if (!resolved_config.empty()) j["resolved_config"] = resolved_config;
    return j;
}

Backplane::Backplane(SessionConfig config) : config_(std::move(config)) { config_.validate(); }

SessionReport Backplane::run(Listener& listener) {
    SessionRun run(config_, observers_);
    return run.run(listener);
}

SessionReport run_session(const SessionConfig& config, const Endpoint& endpoint,
                          std::span<SessionObserver* const> observers) {
    TcpListener listener(endpoint);
    Backplane bp(config);
    for (auto* o : observers) bp.add_observer(o);
    return bp.run(listener);
}

}  // namespace dtwin::backplane
