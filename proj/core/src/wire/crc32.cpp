#include "dtwin/wire/crc32.hpp"

#include <array>

namespace dtwin::wire {

namespace {

// Slicing-by-4 tables; table[0] is the classic byte-wise table.
constexpr std::array<std::array<std::uint32_t, 256>, 4> make_tables() {
    std::array<std::array<std::uint32_t, 256>, 4> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        t[0][i] = c;
    }
    for (std::uint32_t i = 0; i < 256; ++i) {
        for (std::size_t s = 1; s < 4; ++s) t[s][i] = (t[s - 1][i] >> 8) ^ t[0][t[s - 1][i] & 0xFFu];
    }
    return t;
}

constexpr auto kTables = make_tables();

}  // namespace

std::uint32_t crc32_update(std::uint32_t state, std::span<const std::uint8_t> bytes) noexcept {
    const std::uint8_t* p = bytes.data();
    std::size_t n = bytes.size();
    while (n >= 4) {
        state ^= static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                 (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
        state = kTables[3][state & 0xFFu] ^ kTables[2][(state >> 8) & 0xFFu] ^
                kTables[1][(state >> 16) & 0xFFu] ^ kTables[0][state >> 24];
        p += 4;
        n -= 4;
    }
    while (n-- > 0) state = (state >> 8) ^ kTables[0][(state ^ *p++) & 0xFFu];
    return state;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
    return crc32_final(crc32_update(crc32_init(), bytes));
}

}  // namespace dtwin::wire
