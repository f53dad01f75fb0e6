#pragma once

namespace dtwin::perception {

struct PiParams {
    double kp = 0.5;  // 1/(m/s)
    double ki = 0.1;  // 1/m
    double initial_v_ref = 8.0;  // m/s
    friend bool operator==(const PiParams&, const PiParams&) = default;
};

/// Speed loop state. The output u in [u_min, u_max] maps to throttle (u >= 0)
/// or brake (u < 0).
struct PiState {
    double kp = 0.5;
    double ki = 0.1;
    double integrator = 0.0;  // m
    double v_ref = 0.0;       // m/s
    double u_min = -1.0;
    double u_max = 1.0;
};

struct Pedals {
    double throttle = 0.0;
    double brake = 0.0;
};

/// e = v_ref - v; u = kp*e + ki*(I + e*dt). The integrator only accepts the
/// new error when u is unsaturated (conditional integration), so throttle and
/// brake are never both positive.
Pedals pi_speed_control(double v, PiState& state, double dt);

}  // namespace dtwin::perception
