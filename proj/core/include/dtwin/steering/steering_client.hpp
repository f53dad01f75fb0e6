#pragma once

#include <optional>
#include <vector>

#include "dtwin/environment/track.hpp"
#include "dtwin/gateway/client_handle.hpp"
#include "dtwin/steering/pure_pursuit.hpp"

namespace dtwin::steering {

/// Lane keeping: on each telemetry message, project onto the known centerline,
/// pick the lookahead point and send a steering command to the vehicle.
/// Without telemetry it stays silent and the vehicle holds its last command.
class SteeringClient {
public:
    SteeringClient(environment::Track track, PurePursuitParams params, wire::MacAddress vehicle_mac);

    std::vector<gateway::Outgoing> operator()(const gateway::Inbox& inbox);

    std::optional<double> last_command() const noexcept { return last_; }

private:
    environment::Track track_;
    PurePursuitParams params_;
    wire::MacAddress vehicle_mac_;
    std::optional<double> last_;
};

}  // namespace dtwin::steering
