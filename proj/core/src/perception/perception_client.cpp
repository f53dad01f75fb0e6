#include "dtwin/perception/perception_client.hpp"

#include "dtwin/error.hpp"

namespace dtwin::perception {

PerceptionClient::PerceptionClient(PiParams params, double dt, wire::MacAddress vehicle_mac)
    : dt_(dt), vehicle_mac_(vehicle_mac) {
    pi_.kp = params.kp;
    pi_.ki = params.ki;
    pi_.v_ref = params.initial_v_ref;
}

std::vector<gateway::Outgoing> PerceptionClient::operator()(const gateway::Inbox& inbox) {
    std::vector<gateway::Outgoing> out;
    const wire::VehicleTelemetry* telemetry = nullptr;
    bool saw_frame = false;
    std::uint16_t detected = 0;

    for (const auto& item : inbox.items) {
        if (const auto* frame = std::get_if<wire::CameraFrame>(&item.payload)) {
            Detection d;
            try {
                d = detect_sign(*frame);
            } catch (const Error&) {
                continue;
            }
            saw_frame = true;
            detected = d.limit_kmh;
            if (d.limit_kmh != 0) {
                pi_.v_ref = d.limit_kmh / 3.6;
                last_detection_ = d.limit_kmh;
            }
        } else if (const auto* t = std::get_if<wire::VehicleTelemetry>(&item.payload)) {
            telemetry = t;
        }
    }

    if (telemetry) {
        const Pedals p = pi_speed_control(telemetry->speed, pi_, dt_);
        out.push_back({vehicle_mac_, wire::SpeedCommand{static_cast<float>(p.throttle), static_cast<float>(p.brake)}});
    }
    if (saw_frame) out.push_back({wire::MacAddress::broadcast(), wire::DetectionReport{detected}});
    return out;
}

}  // namespace dtwin::perception
