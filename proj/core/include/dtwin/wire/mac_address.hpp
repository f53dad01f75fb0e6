#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace dtwin::wire {

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    static constexpr MacAddress broadcast() {
        return MacAddress{{0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF}};
    }

    /// Locally administered unicast address 02:00:00:00:hi:lo.
    static constexpr MacAddress local(std::uint16_t index) {
        return MacAddress{{0x02, 0x00, 0x00, 0x00, static_cast<std::uint8_t>(index >> 8),
                           static_cast<std::uint8_t>(index & 0xFF)}};
    }

    /// Parses "aa:bb:cc:dd:ee:ff" (case-insensitive, ':' or '-' separators).
    /// Throws Error(ParseError) on malformed text.
    static MacAddress parse(std::string_view text);

    constexpr bool is_broadcast() const { return *this == broadcast(); }
    constexpr bool is_multicast() const { return (octets[0] & 0x01) != 0; }
    constexpr bool is_locally_administered() const { return (octets[0] & 0x02) != 0; }

    std::string to_string() const;

    friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;
};

}  // namespace dtwin::wire
