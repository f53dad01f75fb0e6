#pragma once

#include <cstdint>
#include <optional>

#include "dtwin/environment/track.hpp"
#include "dtwin/vehicle/vehicle_model.hpp"
#include "dtwin/wire/camera_frame.hpp"

namespace dtwin::environment {

struct CameraParams {
    int width = 64;
    int height = 48;
    double fov = 1.0;            // horizontal field of view, rad
    double range = 40.0;         // m
    double mount_height = 1.2;   // m above ground
    double noise = 0.0;          // uniform pixel noise amplitude (0..255), 0 = off
    friend bool operator==(const CameraParams&, const CameraParams&) = default;
};

/// The sign the camera would draw, if any.
struct VisibleSign {
    SpeedSign sign;
    double distance = 0.0;  // along-track, m
    double bearing = 0.0;   // rad, positive to the left
    int radius_px = 0;
    double cx = 0.0;
    double cy = 0.0;
};

/// Glyph radius for a sign `distance` metres ahead: clamp(round(320/d), 4, 20).
int glyph_radius(double distance) noexcept;

/// The next sign ahead of `ego_s` if it is within (0, range] and inside the FOV.
std::optional<VisibleSign> visible_sign(const vehicle::VehicleState& ego, double ego_s, const Track& track,
                                        const CameraParams& cam) noexcept;

/// Deterministic synthetic RGB frame: sky, grass, grey road with white lane
/// edges (point-sampled on the ground plane), plus the next visible sign.
wire::CameraFrame render_camera(const vehicle::VehicleState& ego, const Track& track, const CameraParams& cam);

}  // namespace dtwin::environment
