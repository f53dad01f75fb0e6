#include "dtwin/vehicle/vehicle_client.hpp"

namespace dtwin::vehicle {

VehicleClient::VehicleClient(VehicleParams params, VehicleState initial, double dt)
    : params_(params), state_(initial), dt_(dt) {}

std::vector<gateway::Outgoing> VehicleClient::operator()(const gateway::Inbox& inbox) {
    for (const auto& item : inbox.items) {
        if (const auto* s = std::get_if<wire::SteeringCommand>(&item.payload)) {
            command_.steering = s->steering;
        } else if (const auto* c = std::get_if<wire::SpeedCommand>(&item.payload)) {
            command_.throttle = c->throttle;
            command_.brake = c->brake;
        }
    }
    state_ = integrate_step(state_, command_, params_, dt_);
    return {gateway::Outgoing{wire::MacAddress::broadcast(), to_telemetry(state_)}};
}

}  // namespace dtwin::vehicle
