#pragma once

#include "dtwin/wire/payload.hpp"

namespace dtwin::vehicle {

/// Point-mass longitudinal dynamics on top of a kinematic bicycle.
struct VehicleParams {
    double mass = 1000.0;            // kg
    double wheelbase = 2.5;          // m
    double max_steer = 0.5;          // rad
    double max_drive_force = 4000.0; // N
    double max_brake_force = 8000.0; // N
    double drag = 0.38;              // 0.5 * rho * Cd * A, kg/m
    double rolling = 0.012;          // Crr
    double gravity = 9.81;           // m/s^2

    /// Throws ValidationError listing every violated constraint.
    void validate() const;
    friend bool operator==(const VehicleParams&, const VehicleParams&) = default;
};

struct VehicleState {
    double x = 0.0;        // m
    double y = 0.0;        // m
    double heading = 0.0;  // rad, (-pi, pi]
    double speed = 0.0;    // m/s, never negative
    double accel = 0.0;    // m/s^2, (v' - v) / dt of the last step

    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ActuationCommand {
    double steering = 0.0;  // rad
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]
};

/// a = (throttle*F_max - brake*B_max*[v>0] - c_d*v^2 - Crr*m*g*[v>0]) / m.
/// Inputs outside [0, 1] are clamped.
double longitudinal_accel(double speed, double throttle, double brake, const VehicleParams& p);

/// One semi-implicit Euler step: speed first (floored at zero), then heading
/// from the new speed, then position from the new heading.
VehicleState integrate_step(const VehicleState& s, const ActuationCommand& cmd, const VehicleParams& p, double dt);

wire::VehicleTelemetry to_telemetry(const VehicleState& s);

}  // namespace dtwin::vehicle
