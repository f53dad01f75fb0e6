#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "dtwin/error.hpp"

namespace dtwin::wire {

/// Appends scalars to a byte buffer. Payload and control-protocol scalars are
/// little-endian; Ethernet header fields use the explicit big-endian helpers.
class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16le(std::uint16_t v) { put_le(v, 2); }
    void u32le(std::uint32_t v) { put_le(v, 4); }
    void u64le(std::uint64_t v) { put_le(v, 8); }
    void f32le(float v) { u32le(std::bit_cast<std::uint32_t>(v)); }
    void u16be(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32be(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

private:
    void put_le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t>& out_;
};

/// Bounds-checked cursor over a byte span. Running past the end throws
/// Error(`underflow_kind`).
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in, ErrorKind underflow_kind = ErrorKind::Truncated)
        : in_(in), kind_(underflow_kind) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16le() { return static_cast<std::uint16_t>(get_le(2)); }
    std::uint32_t u32le() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u64le() { return get_le(8); }
    float f32le() { return std::bit_cast<float>(u32le()); }
    std::uint16_t u16be() {
        auto b = take(2);
        return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
    }
    std::uint32_t u32be() {
        auto b = take(4);
        return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
               (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        if (n > remaining()) {
            throw Error(kind_, "need " + std::to_string(n) + " bytes, have " + std::to_string(remaining()));
        }
        auto out = in_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::size_t remaining() const { return in_.size() - pos_; }
    bool at_end() const { return pos_ == in_.size(); }

private:
    std::uint64_t get_le(int n) {
        auto b = take(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    ErrorKind kind_;
};

}  // namespace dtwin::wire
