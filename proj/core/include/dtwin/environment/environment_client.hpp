#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dtwin/environment/camera.hpp"
#include "dtwin/environment/track.hpp"
#include "dtwin/gateway/client_handle.hpp"

namespace dtwin::environment {

/// World/sensor server: follows the ego pose from telemetry (holding the last
/// one, initially the scenario's start pose) and sends one camera frame per
/// step, fragmented, to the perception client.
class EnvironmentClient {
public:
    EnvironmentClient(Track track, CameraParams camera, vehicle::VehicleState initial, wire::MacAddress perception_mac,
                      std::uint64_t noise_seed = 0);

    std::vector<gateway::Outgoing> operator()(const gateway::Inbox& inbox);

    const vehicle::VehicleState& pose() const noexcept { return pose_; }

private:
    Track track_;
    CameraParams camera_;
    vehicle::VehicleState pose_;
    wire::MacAddress perception_mac_;
    std::uint16_t frame_seq_ = 0;
    std::mt19937_64 rng_;
};

/// Adds uniform integer noise in [-amplitude, amplitude] to every channel.
void apply_pixel_noise(wire::CameraFrame& frame, double amplitude, std::mt19937_64& rng);

}  // namespace dtwin::environment
