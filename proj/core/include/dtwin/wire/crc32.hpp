#pragma once

#include <cstdint>
#include <span>

namespace dtwin::wire {

/// IEEE 802.3 CRC-32 (reflected polynomial 0xEDB88320, init and final XOR 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

/// Incremental form: feed `crc32_update(crc32_init(), ...)` chunks, then `crc32_final`.
constexpr std::uint32_t crc32_init() noexcept { return 0xFFFFFFFFu; }
std::uint32_t crc32_update(std::uint32_t state, std::span<const std::uint8_t> bytes) noexcept;
constexpr std::uint32_t crc32_final(std::uint32_t state) noexcept { return state ^ 0xFFFFFFFFu; }

}  // namespace dtwin::wire
