#include "dtwin/perception/pi_controller.hpp"

#include <algorithm>

namespace dtwin::perception {

Pedals pi_speed_control(double v, PiState& state, double dt) {
    const double e = state.v_ref - v;
    const double candidate = state.integrator + e * dt;
    const double u_unsat = state.kp * e + state.ki * candidate;
    if (u_unsat >= state.u_min && u_unsat <= state.u_max) state.integrator = candidate;
    const double u = std::clamp(u_unsat, state.u_min, state.u_max);
    return u >= 0.0 ? Pedals{u, 0.0} : Pedals{0.0, -u};
}

}  // namespace dtwin::perception
