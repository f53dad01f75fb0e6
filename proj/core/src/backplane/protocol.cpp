#include "dtwin/backplane/protocol.hpp"

#include <fmt/format.h>

#include "dtwin/error.hpp"
#include "dtwin/wire/byte_io.hpp"

namespace dtwin::backplane {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void write_frames(wire::ByteWriter& w, const std::vector<std::vector<std::uint8_t>>& frames) {
    if (frames.size() > 0xFFFF) throw Error(ErrorKind::ProtocolError, "more than 65535 frames in one step");
    w.u16le(static_cast<std::uint16_t>(frames.size()));
    for (const auto& f : frames) {
        if (f.size() > 0xFFFF) throw Error(ErrorKind::ProtocolError, "frame longer than 65535 bytes");
        w.u16le(static_cast<std::uint16_t>(f.size()));
        w.bytes(f);
    }
}

std::vector<std::vector<std::uint8_t>> read_frames(wire::ByteReader& r) {
    const std::uint16_t count = r.u16le();
    std::vector<std::vector<std::uint8_t>> frames;
    frames.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        const std::uint16_t len = r.u16le();
        const auto bytes = r.take(len);
        frames.emplace_back(bytes.begin(), bytes.end());
    }
    return frames;
}

}  // namespace

std::vector<std::uint8_t> encode_message(const ControlMessage& message) {
    std::vector<std::uint8_t> out(4, 0);
    wire::ByteWriter w(out);
    std::visit(overloaded{
                   [&](const Hello& m) {
                       if (m.name.size() > 0xFFFF) throw Error(ErrorKind::ProtocolError, "client name too long");
                       w.u8(static_cast<std::uint8_t>(MessageType::Hello));
                       w.u16le(static_cast<std::uint16_t>(m.name.size()));
                       w.bytes({reinterpret_cast<const std::uint8_t*>(m.name.data()), m.name.size()});
                       w.bytes(m.mac.octets);
                   },
                   [&](const HelloAck& m) {
                       w.u8(static_cast<std::uint8_t>(MessageType::HelloAck));
                       w.u16le(m.port_id);
                       w.u64le(m.dt_ns);
                       w.u64le(m.total_steps);
                   },
                   [&](const Grant& m) {
                       w.u8(static_cast<std::uint8_t>(MessageType::Grant));
                       w.u64le(m.step);
                       write_frames(w, m.frames);
                   },
                   [&](const Done& m) {
                       w.u8(static_cast<std::uint8_t>(MessageType::Done));
                       w.u64le(m.step);
                       write_frames(w, m.frames);
                   },
                   [&](const Bye& m) {
                       w.u8(static_cast<std::uint8_t>(MessageType::Bye));
                       w.u8(static_cast<std::uint8_t>(m.reason));
                   },
               },
               message);
    const std::size_t len = out.size() - 4;
    if (len > kMaxMessage) throw Error(ErrorKind::ProtocolError, fmt::format("message of {} bytes", len));
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(len >> (8 * i));
    return out;
}

ControlMessage decode_message(std::span<const std::uint8_t> body) {
    wire::ByteReader r(body, ErrorKind::ProtocolError);
    const auto type = static_cast<MessageType>(r.u8());
    ControlMessage msg;
    switch (type) {
        case MessageType::Hello: {
            Hello h;
            const auto name = r.take(r.u16le());
            h.name.assign(name.begin(), name.end());
            std::copy_n(r.take(6).begin(), 6, h.mac.octets.begin());
            msg = std::move(h);
            break;
        }
        case MessageType::HelloAck: {
            HelloAck a;
            a.port_id = r.u16le();
            a.dt_ns = r.u64le();
            a.total_steps = r.u64le();
            msg = a;
            break;
        }
        case MessageType::Grant: {
            Grant g;
            g.step = r.u64le();
            g.frames = read_frames(r);
            msg = std::move(g);
            break;
        }
        case MessageType::Done: {
            Done d;
            d.step = r.u64le();
            d.frames = read_frames(r);
            msg = std::move(d);
            break;
        }
        case MessageType::Bye: {
            const std::uint8_t reason = r.u8();
            if (reason > static_cast<std::uint8_t>(ByeReason::Aborted)) {
                throw Error(ErrorKind::ProtocolError, fmt::format("unknown BYE reason {}", reason));
            }
            msg = Bye{static_cast<ByeReason>(reason)};
            break;
        }
        default:
            throw Error(ErrorKind::ProtocolError, fmt::format("unknown message type 0x{:02x}", body[0]));
    }
    if (!r.at_end()) {
        throw Error(ErrorKind::ProtocolError, fmt::format("{} trailing bytes in message", r.remaining()));
    }
    return msg;
}

std::string_view to_string(ByeReason reason) noexcept {
    switch (reason) {
        case ByeReason::Finished: return "finished";
        case ByeReason::RosterMismatch: return "roster mismatch";
        case ByeReason::Refused: return "refused";
        case ByeReason::Timeout: return "timeout";
        case ByeReason::ProtocolError: return "protocol error";
        case ByeReason::Aborted: return "aborted";
    }
    return "unknown";
}

}  // namespace dtwin::backplane
