#pragma once

#include <vector>

#include "dtwin/gateway/client_handle.hpp"
#include "dtwin/vehicle/vehicle_model.hpp"

namespace dtwin::vehicle {

/// Per-step behaviour of the vehicle: merge the latest commands (last writer
/// wins, holding previous values when none arrive), integrate one step, and
/// broadcast telemetry.
class VehicleClient {
public:
    VehicleClient(VehicleParams params, VehicleState initial, double dt);

    std::vector<gateway::Outgoing> operator()(const gateway::Inbox& inbox);

    const VehicleState& state() const noexcept { return state_; }
    const ActuationCommand& command() const noexcept { return command_; }

private:
    VehicleParams params_;
    VehicleState state_;
    ActuationCommand command_;
    double dt_;
};

}  // namespace dtwin::vehicle
