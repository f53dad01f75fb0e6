#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtwin/wire/mac_address.hpp"

namespace dtwin::wire {

inline constexpr std::size_t kMaxPayload = 1500;
/// dst(6) + src(6) + ethertype(2) + fcs(4).
inline constexpr std::size_t kFrameOverhead = 18;
/// IEEE 802 "local experimental" EtherType used for every simulated payload.
inline constexpr std::uint16_t kEtherTypeDigitalTwin = 0x88B5;

struct EthernetFrame {
    MacAddress dst;
    MacAddress src;
    std::uint16_t ethertype = kEtherTypeDigitalTwin;
    std::vector<std::uint8_t> payload;
    std::uint32_t fcs = 0;

    friend bool operator==(const EthernetFrame&, const EthernetFrame&) = default;
};

/// CRC-32 over dst‖src‖ethertype(big-endian)‖payload.
std::uint32_t compute_fcs(const MacAddress& dst, const MacAddress& src, std::uint16_t ethertype,
                          std::span<const std::uint8_t> payload) noexcept;

/// Builds a frame with a valid FCS. Throws OversizedPayload above 1500 bytes.
EthernetFrame make_frame(const MacAddress& dst, const MacAddress& src, std::vector<std::uint8_t> payload,
                         std::uint16_t ethertype = kEtherTypeDigitalTwin);

/// Serializes dst‖src‖ethertype‖payload‖fcs with a freshly computed FCS.
/// Throws OversizedPayload.
std::vector<std::uint8_t> encode_frame(const EthernetFrame& frame);

/// Parses and verifies a frame. Throws Truncated (< 18 bytes), OversizedPayload
/// or FcsMismatch.
EthernetFrame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace dtwin::wire
