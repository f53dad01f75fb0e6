#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dtwin/backplane/transport.hpp"
#include "dtwin/wire/camera_frame.hpp"
#include "dtwin/wire/mac_address.hpp"
#include "dtwin/wire/payload.hpp"

namespace dtwin::gateway {

/// Payload with a schema id the SDK does not know, passed through untouched.
struct RawPayload {
    std::vector<std::uint8_t> bytes;
    friend bool operator==(const RawPayload&, const RawPayload&) = default;
};

/// What client logic sees: camera fragments arrive already merged into a
/// whole CameraFrame.
using InboxPayload = std::variant<wire::VehicleTelemetry, wire::SteeringCommand, wire::SpeedCommand,
                                  wire::CameraFrame, wire::DetectionReport, RawPayload>;

struct InboxItem {
    wire::MacAddress src;
    InboxPayload payload;
};

struct Inbox {
    std::uint64_t step = 0;
    std::vector<InboxItem> items;
};

struct Outgoing {
    wire::MacAddress dst;
    wire::Payload payload;
};

using ComputeFn = std::function<std::vector<Outgoing>(const Inbox&)>;

enum class StepStatus { Running, Finished };

struct GatewayStats {
    std::uint64_t frames_received = 0;
    std::uint64_t fcs_drops = 0;
    /// Frames addressed to another unicast MAC (seen only through flooding).
    std::uint64_t filtered = 0;
    std::uint64_t malformed_payloads = 0;
    std::uint64_t incomplete_images = 0;
    std::uint64_t frames_sent = 0;
};

/// Turns one GRANT's encoded frames into inbox items: FCS failures and frames
/// for other unicast MACs are dropped (and counted), camera fragments are
/// reassembled, unknown schemas become RawPayload. Exposed for testing.
std::vector<InboxItem> decode_inbox(const std::vector<std::vector<std::uint8_t>>& frames,
                                    const wire::MacAddress& own_mac, GatewayStats& stats);

/// Single-owner client endpoint of the backplane protocol.
class ClientHandle {
public:
    /// Sends HELLO and waits for HELLO_ACK. Throws RosterMismatch or Refused
    /// when the backplane answers with BYE, ProtocolError on anything else,
    /// TransportError if the stream dies.
    static ClientHandle connect(std::unique_ptr<backplane::Connection> connection, std::string name,
                                wire::MacAddress mac,
                                std::chrono::milliseconds timeout = std::chrono::seconds(60));
    static ClientHandle connect(const backplane::Endpoint& endpoint, std::string name, wire::MacAddress mac,
                                std::chrono::milliseconds timeout = std::chrono::seconds(60));

    ClientHandle(ClientHandle&&) noexcept;
    ClientHandle& operator=(ClientHandle&&) noexcept;
    ~ClientHandle();

    /// Waits for GRANT(k), runs `compute` exactly once on the decoded inbox,
    /// sends DONE(k) with the outputs (src forced to this client's MAC; camera
    /// images are fragmented by the caller via wire::fragment_payload).
    StepStatus step(const ComputeFn& compute);

    /// Closes the stream; the backplane sees the client depart.
    void close() noexcept;

    const std::string& name() const noexcept { return name_; }
    const wire::MacAddress& mac() const noexcept { return mac_; }
    std::uint16_t port_id() const noexcept { return port_id_; }
    std::uint64_t dt_ns() const noexcept { return dt_ns_; }
    double dt() const noexcept { return static_cast<double>(dt_ns_) * 1e-9; }
    std::uint64_t total_steps() const noexcept { return total_steps_; }
    /// Index of the next step to run.
    std::uint64_t current_step() const noexcept { return step_; }
    bool finished() const noexcept { return step_ >= total_steps_; }
    const GatewayStats& stats() const noexcept { return stats_; }

private:
    ClientHandle(std::unique_ptr<backplane::Connection> connection, std::string name, wire::MacAddress mac,
                 std::chrono::milliseconds timeout);

    std::unique_ptr<backplane::Connection> conn_;
    std::string name_;
    wire::MacAddress mac_;
    std::chrono::milliseconds timeout_;
    std::uint16_t port_id_ = 0;
    std::uint64_t dt_ns_ = 0;
    std::uint64_t total_steps_ = 0;
    std::uint64_t step_ = 0;
    GatewayStats stats_;
};

}  // namespace dtwin::gateway
