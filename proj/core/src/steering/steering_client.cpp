#include "dtwin/steering/steering_client.hpp"

namespace dtwin::steering {

SteeringClient::SteeringClient(environment::Track track, PurePursuitParams params, wire::MacAddress vehicle_mac)
    : track_(std::move(track)), params_(params), vehicle_mac_(vehicle_mac) {}

std::vector<gateway::Outgoing> SteeringClient::operator()(const gateway::Inbox& inbox) {
    const wire::VehicleTelemetry* latest = nullptr;
    for (const auto& item : inbox.items) {
        if (const auto* t = std::get_if<wire::VehicleTelemetry>(&item.payload)) latest = t;
    }
    if (!latest) return {};

    const vehicle::VehicleState ego{latest->x, latest->y, latest->heading, latest->speed, latest->accel};
    const double s = track_.project({ego.x, ego.y}).s;
    const Point2 goal = lookahead_point(s, params_.lookahead(ego.speed), track_);
    const double delta = pure_pursuit_steer(ego, goal, params_);
    last_ = delta;
    return {gateway::Outgoing{vehicle_mac_, wire::SteeringCommand{static_cast<float>(delta)}}};
}

}  // namespace dtwin::steering
