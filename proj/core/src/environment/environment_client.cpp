#include "dtwin/environment/environment_client.hpp"

#include <algorithm>
#include <cmath>

#include "dtwin/wire/fragment.hpp"

namespace dtwin::environment {

EnvironmentClient::EnvironmentClient(Track track, CameraParams camera, vehicle::VehicleState initial,
                                     wire::MacAddress perception_mac, std::uint64_t noise_seed)
    : track_(std::move(track)), camera_(camera), pose_(initial), perception_mac_(perception_mac), rng_(noise_seed) {}

std::vector<gateway::Outgoing> EnvironmentClient::operator()(const gateway::Inbox& inbox) {
    for (const auto& item : inbox.items) {
        if (const auto* t = std::get_if<wire::VehicleTelemetry>(&item.payload)) {
            pose_ = {t->x, t->y, t->heading, t->speed, t->accel};
        }
    }

    wire::CameraFrame frame = render_camera(pose_, track_, camera_);
    if (camera_.noise > 0.0) apply_pixel_noise(frame, camera_.noise, rng_);

    std::vector<gateway::Outgoing> out;
    for (auto& frag : wire::fragment_payload(frame, frame_seq_++)) {
        out.push_back({perception_mac_, std::move(frag)});
    }
    return out;
}

void apply_pixel_noise(wire::CameraFrame& frame, double amplitude, std::mt19937_64& rng) {
    const int a = static_cast<int>(std::lround(std::clamp(amplitude, 0.0, 255.0)));
    std::uniform_int_distribution<int> dist(-a, a);
    for (auto& px : frame.pixels) px = static_cast<std::uint8_t>(std::clamp(px + dist(rng), 0, 255));
}

}  // namespace dtwin::environment
