#include "dtwin/gateway/client_handle.hpp"

#include <map>
#include <utility>

#include <fmt/format.h>

#include "dtwin/backplane/protocol.hpp"
#include "dtwin/error.hpp"
#include "dtwin/wire/fragment.hpp"
#include "dtwin/wire/frame.hpp"

namespace dtwin::gateway {

namespace bp = dtwin::backplane;

namespace {

ErrorKind error_for(bp::ByeReason reason) {
    switch (reason) {
        case bp::ByeReason::RosterMismatch: return ErrorKind::RosterMismatch;
        case bp::ByeReason::Refused: return ErrorKind::Refused;
        case bp::ByeReason::Timeout: return ErrorKind::ClientTimeout;
        case bp::ByeReason::ProtocolError: return ErrorKind::ProtocolError;
        default: return ErrorKind::TransportError;
    }
}

}  // namespace

std::vector<InboxItem> decode_inbox(const std::vector<std::vector<std::uint8_t>>& frames,
                                    const wire::MacAddress& own_mac, GatewayStats& stats) {
    std::vector<InboxItem> items;
    // Camera fragments are collected per (sender, frame_seq); the whole image
    // takes the inbox position of its last fragment.
    std::map<std::pair<wire::MacAddress, std::uint16_t>, std::vector<wire::CameraFragment>> partial;

    for (const auto& bytes : frames) {
        ++stats.frames_received;
        wire::EthernetFrame frame;
        try {
            frame = wire::decode_frame(bytes);
        } catch (const Error&) {
            ++stats.fcs_drops;
            continue;
        }
        if (frame.dst != own_mac && !frame.dst.is_multicast()) {
            ++stats.filtered;
            continue;
        }
        if (frame.ethertype != wire::kEtherTypeDigitalTwin) {
            items.push_back({frame.src, RawPayload{std::move(frame.payload)}});
            continue;
        }
        wire::Payload payload;
        try {
            payload = wire::decode_payload(frame.payload);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::UnknownSchema) {
                items.push_back({frame.src, RawPayload{std::move(frame.payload)}});
            } else {
                ++stats.malformed_payloads;
            }
            continue;
        }

        if (auto* frag = std::get_if<wire::CameraFragment>(&payload)) {
            auto& set = partial[{frame.src, frag->frame_seq}];
            set.push_back(std::move(*frag));
            if (set.size() == set.front().fragment_count) {
                try {
                    items.push_back({frame.src, wire::reassemble(set)});
                } catch (const Error&) {
                    ++stats.malformed_payloads;
                }
                partial.erase({frame.src, set.front().frame_seq});
            }
            continue;
        }
        std::visit(
            [&](auto&& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (!std::is_same_v<T, wire::CameraFragment>) items.push_back({frame.src, std::move(p)});
            },
            std::move(payload));
    }
    stats.incomplete_images += partial.size();
    return items;
}

ClientHandle::ClientHandle(std::unique_ptr<bp::Connection> connection, std::string name, wire::MacAddress mac,
                           std::chrono::milliseconds timeout)
    : conn_(std::move(connection)), name_(std::move(name)), mac_(mac), timeout_(timeout) {}

ClientHandle::ClientHandle(ClientHandle&&) noexcept = default;
ClientHandle& ClientHandle::operator=(ClientHandle&&) noexcept = default;

ClientHandle::~ClientHandle() { close(); }

ClientHandle ClientHandle::connect(std::unique_ptr<bp::Connection> connection, std::string name,
                                   wire::MacAddress mac, std::chrono::milliseconds timeout) {
    ClientHandle h(std::move(connection), std::move(name), mac, timeout);
    h.conn_->send(bp::encode_message(bp::Hello{h.name_, h.mac_}));

    const bp::Received r = h.conn_->receive(bp::SteadyClock::now() + timeout);
    if (r.status == bp::RecvStatus::Timeout) {
        throw Error(ErrorKind::TransportError, fmt::format("'{}': no HELLO_ACK within {} ms", h.name_, timeout.count()));
    }
    if (r.status == bp::RecvStatus::Closed) {
        throw Error(ErrorKind::TransportError, fmt::format("'{}': backplane closed during join", h.name_));
    }
    const bp::ControlMessage msg = bp::decode_message(r.body);
    if (const auto* bye = std::get_if<bp::Bye>(&msg)) {
        throw Error(error_for(bye->reason), fmt::format("'{}' rejected: {}", h.name_, bp::to_string(bye->reason)));
    }
    const auto* ack = std::get_if<bp::HelloAck>(&msg);
    if (!ack) throw Error(ErrorKind::ProtocolError, fmt::format("'{}': expected HELLO_ACK", h.name_));
    h.port_id_ = ack->port_id;
    h.dt_ns_ = ack->dt_ns;
    h.total_steps_ = ack->total_steps;
    return h;
}

ClientHandle ClientHandle::connect(const bp::Endpoint& endpoint, std::string name, wire::MacAddress mac,
                                   std::chrono::milliseconds timeout) {
    return connect(bp::tcp_connect(endpoint, timeout), std::move(name), mac, timeout);
}

StepStatus ClientHandle::step(const ComputeFn& compute) {
    if (!conn_) throw Error(ErrorKind::ProtocolError, fmt::format("'{}': handle is closed", name_));
    if (finished()) {
        throw Error(ErrorKind::ProtocolError,
                    fmt::format("'{}': step called after the last step ({})", name_, total_steps_));
    }

    const bp::Received r = conn_->receive(bp::SteadyClock::now() + timeout_);
    if (r.status == bp::RecvStatus::Timeout) {
        throw Error(ErrorKind::ClientTimeout, fmt::format("'{}': no GRANT({}) within {} ms", name_, step_,
                                                          timeout_.count()));
    }
    if (r.status == bp::RecvStatus::Closed) {
        throw Error(ErrorKind::TransportError, fmt::format("'{}': backplane closed the stream", name_));
    }
    bp::ControlMessage msg = bp::decode_message(r.body);
    if (const auto* bye = std::get_if<bp::Bye>(&msg)) {
        throw Error(error_for(bye->reason),
                    fmt::format("'{}': backplane ended the session at step {}: {}", name_, step_, bp::to_string(bye->reason)));
    }
    auto* grant = std::get_if<bp::Grant>(&msg);
    if (!grant) throw Error(ErrorKind::ProtocolError, fmt::format("'{}': expected GRANT", name_));
    if (grant->step != step_) {
        throw Error(ErrorKind::ProtocolError,
                    fmt::format("'{}': GRANT({}) while expecting step {}", name_, grant->step, step_));
    }

    const Inbox inbox{step_, decode_inbox(grant->frames, mac_, stats_)};
    const std::vector<Outgoing> out = compute(inbox);

    bp::Done done{step_, {}};
    done.frames.reserve(out.size());
    for (const auto& o : out) {
        done.frames.push_back(wire::encode_frame(wire::make_frame(o.dst, mac_, wire::encode_payload(o.payload))));
    }
    stats_.frames_sent += done.frames.size();
    conn_->send(bp::encode_message(done));

    ++step_;
    return finished() ? StepStatus::Finished : StepStatus::Running;
}

void ClientHandle::close() noexcept {
    if (conn_) {
        conn_->close();
        conn_.reset();
    }
}

}  // namespace dtwin::gateway
