#include "dtwin/wire/payload.hpp"

#include <fmt/format.h>

#include "dtwin/error.hpp"
#include "dtwin/wire/byte_io.hpp"

namespace dtwin::wire {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kCameraHeader = 10;

}  // namespace

SchemaId schema_of(const Payload& payload) noexcept {
    return std::visit(overloaded{
                          [](const VehicleTelemetry&) { return SchemaId::VehicleTelemetry; },
                          [](const SteeringCommand&) { return SchemaId::SteeringCommand; },
                          [](const SpeedCommand&) { return SchemaId::SpeedCommand; },
                          [](const CameraFragment&) { return SchemaId::CameraFragment; },
                          [](const DetectionReport&) { return SchemaId::DetectionReport; },
                      },
                      payload);
}

std::vector<std::uint8_t> encode_payload(const Payload& payload) {
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    w.u8(static_cast<std::uint8_t>(schema_of(payload)));
    std::visit(overloaded{
                   [&](const VehicleTelemetry& t) {
                       w.f32le(t.x);
                       w.f32le(t.y);
                       w.f32le(t.heading);
                       w.f32le(t.speed);
                       w.f32le(t.accel);
                   },
                   [&](const SteeringCommand& s) { w.f32le(s.steering); },
                   [&](const SpeedCommand& s) {
                       w.f32le(s.throttle);
                       w.f32le(s.brake);
                   },
                   [&](const CameraFragment& c) {
                       out.reserve(1 + kCameraHeader + c.data.size());
                       w.u16le(c.frame_seq);
                       w.u16le(c.fragment_index);
                       w.u16le(c.fragment_count);
                       w.u16le(c.width);
                       w.u16le(c.height);
                       w.bytes(c.data);
                   },
                   [&](const DetectionReport& d) { w.u16le(d.limit_kmh); },
               },
               payload);
    return out;
}

Payload decode_payload(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw Error(ErrorKind::MalformedPayload, "empty payload");
    ByteReader r(bytes.subspan(1), ErrorKind::MalformedPayload);
    const auto expect_exact = [&](std::size_t n) {
        if (r.remaining() != n) {
            throw Error(ErrorKind::MalformedPayload,
                        fmt::format("schema 0x{:02x} expects {} body bytes, got {}", bytes[0], n, r.remaining()));
        }
    };

    switch (static_cast<SchemaId>(bytes[0])) {
        case SchemaId::VehicleTelemetry: {
            expect_exact(20);
            VehicleTelemetry t;
            t.x = r.f32le();
            t.y = r.f32le();
            t.heading = r.f32le();
            t.speed = r.f32le();
            t.accel = r.f32le();
            return t;
        }
        case SchemaId::SteeringCommand:
            expect_exact(4);
            return SteeringCommand{r.f32le()};
        case SchemaId::SpeedCommand: {
            expect_exact(8);
            SpeedCommand s;
            s.throttle = r.f32le();
            s.brake = r.f32le();
            return s;
        }
        case SchemaId::CameraFragment: {
            CameraFragment c;
            c.frame_seq = r.u16le();
            c.fragment_index = r.u16le();
            c.fragment_count = r.u16le();
            c.width = r.u16le();
            c.height = r.u16le();
            const auto data = r.take(r.remaining());
            c.data.assign(data.begin(), data.end());
            return c;
        }
        case SchemaId::DetectionReport:
            expect_exact(2);
            return DetectionReport{r.u16le()};
    }
    throw Error(ErrorKind::UnknownSchema, fmt::format("schema id 0x{:02x}", bytes[0]));
}

}  // namespace dtwin::wire
