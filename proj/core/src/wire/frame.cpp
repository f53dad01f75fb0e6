#include "dtwin/wire/frame.hpp"

#include <array>

#include <fmt/format.h>

#include "dtwin/error.hpp"
#include "dtwin/wire/byte_io.hpp"
#include "dtwin/wire/crc32.hpp"

namespace dtwin::wire {

namespace {

void check_payload_size(std::size_t n) {
    if (n > kMaxPayload) {
        throw Error(ErrorKind::OversizedPayload, fmt::format("payload of {} bytes exceeds {}", n, kMaxPayload));
    }
}

}  // namespace

std::uint32_t compute_fcs(const MacAddress& dst, const MacAddress& src, std::uint16_t ethertype,
                          std::span<const std::uint8_t> payload) noexcept {
    const std::array<std::uint8_t, 2> type{static_cast<std::uint8_t>(ethertype >> 8),
                                           static_cast<std::uint8_t>(ethertype)};
    std::uint32_t state = crc32_init();
    state = crc32_update(state, dst.octets);
    state = crc32_update(state, src.octets);
    state = crc32_update(state, type);
    state = crc32_update(state, payload);
    return crc32_final(state);
}

EthernetFrame make_frame(const MacAddress& dst, const MacAddress& src, std::vector<std::uint8_t> payload,
                         std::uint16_t ethertype) {
    check_payload_size(payload.size());
    EthernetFrame f{dst, src, ethertype, std::move(payload), 0};
    f.fcs = compute_fcs(f.dst, f.src, f.ethertype, f.payload);
    return f;
}

std::vector<std::uint8_t> encode_frame(const EthernetFrame& frame) {
    check_payload_size(frame.payload.size());
    std::vector<std::uint8_t> out;
    out.reserve(kFrameOverhead + frame.payload.size());
    ByteWriter w(out);
    w.bytes(frame.dst.octets);
    w.bytes(frame.src.octets);
    w.u16be(frame.ethertype);
    w.bytes(frame.payload);
    // The FCS covers everything written so far.
    w.u32be(crc32(out));
    return out;
}

EthernetFrame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFrameOverhead) {
        throw Error(ErrorKind::Truncated, fmt::format("frame of {} bytes is shorter than {}", bytes.size(),
                                                      kFrameOverhead));
    }
    check_payload_size(bytes.size() - kFrameOverhead);

    const auto body = bytes.first(bytes.size() - 4);
    ByteReader r(bytes);
    EthernetFrame f;
    std::copy_n(r.take(6).begin(), 6, f.dst.octets.begin());
    std::copy_n(r.take(6).begin(), 6, f.src.octets.begin());
    f.ethertype = r.u16be();
    const auto payload = r.take(r.remaining() - 4);
    f.payload.assign(payload.begin(), payload.end());
    f.fcs = r.u32be();

    const std::uint32_t expected = crc32(body);
    if (expected != f.fcs) {
        throw Error(ErrorKind::FcsMismatch, fmt::format("fcs {:08x} != computed {:08x}", f.fcs, expected));
    }
    return f;
}

}  // namespace dtwin::wire
