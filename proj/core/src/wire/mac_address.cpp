#include "dtwin/wire/mac_address.hpp"

#include <fmt/format.h>

#include "dtwin/error.hpp"

namespace dtwin::wire {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

MacAddress MacAddress::parse(std::string_view text) {
    if (text.size() != 17) {
        throw Error(ErrorKind::ParseError, fmt::format("bad MAC address '{}'", text));
    }
    MacAddress mac;
    for (std::size_t i = 0; i < 6; ++i) {
        const std::size_t at = i * 3;
        const int hi = hex_value(text[at]);
        const int lo = hex_value(text[at + 1]);
        const bool sep_ok = i == 5 || text[at + 2] == ':' || text[at + 2] == '-';
        if (hi < 0 || lo < 0 || !sep_ok) {
            throw Error(ErrorKind::ParseError, fmt::format("bad MAC address '{}'", text));
        }
        mac.octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return mac;
}

std::string MacAddress::to_string() const {
    return fmt::format("{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", octets[0], octets[1],
                       octets[2], octets[3], octets[4], octets[5]);
}

}  // namespace dtwin::wire
