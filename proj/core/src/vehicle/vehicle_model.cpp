#include "dtwin/vehicle/vehicle_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dtwin/error.hpp"
#include "dtwin/geometry.hpp"

namespace dtwin::vehicle {

void VehicleParams::validate() const {
    std::vector<std::string> bad;
    const auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) bad.push_back(fmt::format("vehicle.{} must be positive (got {})", name, v));
    };
    positive(mass, "mass");
    positive(wheelbase, "wheelbase");
    positive(max_steer, "max_steer");
    positive(max_drive_force, "max_drive_force");
    positive(max_brake_force, "max_brake_force");
    positive(drag, "drag");
    positive(rolling, "rolling");
    positive(gravity, "gravity");
    if (max_steer >= std::numbers::pi / 2) bad.push_back("vehicle.max_steer must be below pi/2");
    if (!bad.empty()) throw Error(ErrorKind::ValidationError, fmt::format("{}", fmt::join(bad, "; ")));
}

double longitudinal_accel(double speed, double throttle, double brake, const VehicleParams& p) {
    throttle = std::clamp(throttle, 0.0, 1.0);
    brake = std::clamp(brake, 0.0, 1.0);
    const double moving = speed > 0.0 ? 1.0 : 0.0;
    const double force = throttle * p.max_drive_force - brake * p.max_brake_force * moving -
                         p.drag * speed * speed - p.rolling * p.mass * p.gravity * moving;
    return force / p.mass;
}

VehicleState integrate_step(const VehicleState& s, const ActuationCommand& cmd, const VehicleParams& p, double dt) {
    const double steer = std::clamp(cmd.steering, -p.max_steer, p.max_steer);
    const double a = longitudinal_accel(s.speed, cmd.throttle, cmd.brake, p);

    VehicleState n;
    n.speed = std::max(0.0, s.speed + a * dt);
    n.heading = wrap_angle(s.heading + (n.speed * std::tan(steer) / p.wheelbase) * dt);
    n.x = s.x + n.speed * std::cos(n.heading) * dt;
    n.y = s.y + n.speed * std::sin(n.heading) * dt;
    n.accel = (n.speed - s.speed) / dt;
    return n;
}

wire::VehicleTelemetry to_telemetry(const VehicleState& s) {
    return {static_cast<float>(s.x), static_cast<float>(s.y), static_cast<float>(s.heading),
            static_cast<float>(s.speed), static_cast<float>(s.accel)};
}

}  // namespace dtwin::vehicle
