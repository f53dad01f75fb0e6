#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace dtwin::wire {

enum class SchemaId : std::uint8_t {
    VehicleTelemetry = 0x01,
    SteeringCommand = 0x02,
    SpeedCommand = 0x03,
    CameraFragment = 0x04,
    DetectionReport = 0x05,
};

struct VehicleTelemetry {
    float x = 0.0f;        // m
    float y = 0.0f;        // m
    float heading = 0.0f;  // rad
    float speed = 0.0f;    // m/s
    float accel = 0.0f;    // m/s^2

    friend bool operator==(const VehicleTelemetry&, const VehicleTelemetry&) = default;
};

struct SteeringCommand {
    float steering = 0.0f;  // rad

    friend bool operator==(const SteeringCommand&, const SteeringCommand&) = default;
};

struct SpeedCommand {
    float throttle = 0.0f;  // [0, 1]
    float brake = 0.0f;     // [0, 1]

    friend bool operator==(const SpeedCommand&, const SpeedCommand&) = default;
};

struct CameraFragment {
    std::uint16_t frame_seq = 0;
    std::uint16_t fragment_index = 0;
    std::uint16_t fragment_count = 0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::uint8_t> data;

    friend bool operator==(const CameraFragment&, const CameraFragment&) = default;
};

struct DetectionReport {
    std::uint16_t limit_kmh = 0;  // 0 = nothing detected

    friend bool operator==(const DetectionReport&, const DetectionReport&) = default;
};

using Payload = std::variant<VehicleTelemetry, SteeringCommand, SpeedCommand, CameraFragment, DetectionReport>;

SchemaId schema_of(const Payload& payload) noexcept;

/// Schema id byte followed by the little-endian body.
std::vector<std::uint8_t> encode_payload(const Payload& payload);

/// Throws UnknownSchema for an unrecognised id byte and MalformedPayload when
/// the body length does not match the schema.
Payload decode_payload(std::span<const std::uint8_t> bytes);

}  // namespace dtwin::wire
