#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dtwin/wire/mac_address.hpp"

namespace dtwin::backplane {

// Control protocol between backplane and gateways. Every message on the
// stream is: u32 length (LE, counts the bytes that follow) ‖ u8 type ‖ body.
// All integers in bodies are little-endian.

enum class MessageType : std::uint8_t {
    Hello = 0x01,
    HelloAck = 0x02,
    Grant = 0x03,
    Done = 0x04,
    Bye = 0x05,
};

enum class ByeReason : std::uint8_t {
    Finished = 0,
    RosterMismatch = 1,
    Refused = 2,
    Timeout = 3,
    ProtocolError = 4,
    Aborted = 5,
};

struct Hello {
    std::string name;
    wire::MacAddress mac;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct HelloAck {
    std::uint16_t port_id = 0;
    std::uint64_t dt_ns = 0;
    std::uint64_t total_steps = 0;
    friend bool operator==(const HelloAck&, const HelloAck&) = default;
};

/// GRANT and DONE share a body: step ‖ u16 frame_count ‖ (u16 len ‖ encoded frame)*.
struct Grant {
    std::uint64_t step = 0;
    std::vector<std::vector<std::uint8_t>> frames;
    friend bool operator==(const Grant&, const Grant&) = default;
};

struct Done {
    std::uint64_t step = 0;
    std::vector<std::vector<std::uint8_t>> frames;
    friend bool operator==(const Done&, const Done&) = default;
};

struct Bye {
    ByeReason reason = ByeReason::Finished;
    friend bool operator==(const Bye&, const Bye&) = default;
};

using ControlMessage = std::variant<Hello, HelloAck, Grant, Done, Bye>;

inline constexpr std::size_t kMaxMessage = 16u << 20;

/// Full stream encoding including the u32 length prefix.
std::vector<std::uint8_t> encode_message(const ControlMessage& message);

/// Decodes type ‖ body (the length prefix already stripped). Throws
/// Error(ProtocolError) on anything malformed.
ControlMessage decode_message(std::span<const std::uint8_t> body);

std::string_view to_string(ByeReason reason) noexcept;

}  // namespace dtwin::backplane
