#pragma once

#include <cstdint>
#include <vector>

#include "dtwin/gateway/client_handle.hpp"
#include "dtwin/perception/pi_controller.hpp"
#include "dtwin/perception/sign_detector.hpp"

namespace dtwin::perception {

/// Perception + speed regulation. Camera frames update the speed reference
/// (km/h -> m/s, held between signs); telemetry drives the PI loop, whose
/// pedals go to the vehicle. Every processed frame is also reported as a
/// broadcast DetectionReport for tracing.
class PerceptionClient {
public:
    PerceptionClient(PiParams params, double dt, wire::MacAddress vehicle_mac);

    std::vector<gateway::Outgoing> operator()(const gateway::Inbox& inbox);

    const PiState& pi() const noexcept { return pi_; }
    std::uint16_t last_detection() const noexcept { return last_detection_; }

private:
    PiState pi_;
    double dt_;
    wire::MacAddress vehicle_mac_;
    std::uint16_t last_detection_ = 0;
};

}  // namespace dtwin::perception
