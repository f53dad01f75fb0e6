#include "dtwin/environment/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtwin/environment/sign_glyph.hpp"
#include "dtwin/error.hpp"
#include "dtwin/geometry.hpp"

namespace dtwin::environment {

namespace {

constexpr glyph::Rgb kSky{135, 190, 230};
constexpr glyph::Rgb kGrass{60, 140, 60};
constexpr glyph::Rgb kFarGrass{80, 120, 80};
constexpr glyph::Rgb kRoad{110, 110, 110};
constexpr glyph::Rgb kLaneEdge{235, 235, 235};
constexpr double kEdgeHalfWidth = 0.12;  // m

void put(wire::CameraFrame& f, int u, int v, glyph::Rgb c) {
    const std::size_t at = (static_cast<std::size_t>(v) * f.width + static_cast<std::size_t>(u)) * 3;
    f.pixels[at] = c.r;
    f.pixels[at + 1] = c.g;
    f.pixels[at + 2] = c.b;
}

}  // namespace

void draw_sign_glyph(wire::CameraFrame& frame, double cx, double cy, int radius, std::uint8_t value) {
    const double r = radius;
    const double inner = glyph::kInnerRatio * r;
    const double half = glyph::kStripeHalfSpan * r;
    const double stripe_w = 2.0 * half / glyph::kStripes;

    const int u0 = std::max(0, static_cast<int>(std::floor(cx - r)) - 1);
    const int u1 = std::min(static_cast<int>(frame.width) - 1, static_cast<int>(std::ceil(cx + r)) + 1);
    const int v0 = std::max(0, static_cast<int>(std::floor(cy - r)) - 1);
    const int v1 = std::min(static_cast<int>(frame.height) - 1, static_cast<int>(std::ceil(cy + r)) + 1);
    for (int v = v0; v <= v1; ++v) {
        for (int u = u0; u <= u1; ++u) {
            const double dx = u + 0.5 - cx;
            const double dy = v + 0.5 - cy;
            const double dist = std::hypot(dx, dy);
            if (dist > r) continue;
            if (dist > inner) {
                put(frame, u, v, glyph::kRed);
                continue;
            }
            glyph::Rgb c = glyph::kWhite;
            if (dx >= -half && dx < half && std::abs(dy) < half) {
                const int idx = std::min(glyph::kStripes - 1, static_cast<int>(std::floor((dx + half) / stripe_w)));
                if ((value >> (glyph::kStripes - 1 - idx)) & 1u) c = glyph::kBlack;
            }
            put(frame, u, v, c);
        }
    }
}

int glyph_radius(double distance) noexcept {
    if (!(distance > 0.0)) return 20;
    return static_cast<int>(std::clamp(std::lround(320.0 / distance), 4L, 20L));
}

std::optional<VisibleSign> visible_sign(const vehicle::VehicleState& ego, double ego_s, const Track& track,
                                        const CameraParams& cam) noexcept {
    const SpeedSign* next = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sg : track.signs()) {
        const double d = track.distance_ahead(ego_s, sg.s);
        if (d > 0.0 && d < best) {
            best = d;
            next = &sg;
        }
    }
    if (!next || best > cam.range) return std::nullopt;

    const Point2 at = track.point_at(next->s);
    const double bearing = wrap_angle(std::atan2(at.y - ego.y, at.x - ego.x) - ego.heading);
    if (std::abs(bearing) > cam.fov / 2) return std::nullopt;

    VisibleSign vs;
    vs.sign = *next;
    vs.distance = best;
    vs.bearing = bearing;
    vs.radius_px = glyph_radius(best);
    vs.cx = cam.width / 2.0 - bearing / cam.fov * cam.width;
    vs.cy = cam.height / 2.0;
    return vs;
}

wire::CameraFrame render_camera(const vehicle::VehicleState& ego, const Track& track, const CameraParams& cam) {
    if (!std::isfinite(ego.x) || !std::isfinite(ego.y) || !std::isfinite(ego.heading)) {
        throw Error(ErrorKind::ValidationError, "ego pose is not finite");
    }
    wire::CameraFrame frame;
    frame.width = static_cast<std::uint16_t>(cam.width);
    frame.height = static_cast<std::uint16_t>(cam.height);
    frame.pixels.assign(frame.byte_size(), 0);

    const double focal = (cam.width / 2.0) / std::tan(cam.fov / 2.0);
    const double horizon = cam.height / 2.0;
    const double c = std::cos(ego.heading);
    const double s = std::sin(ego.heading);
    const double ego_s = track.project({ego.x, ego.y}).s;
    const double hw = track.lane_half_width();

    for (int v = 0; v < cam.height; ++v) {
        const double below = v + 0.5 - horizon;
        if (below <= 0.0) {
            for (int u = 0; u < cam.width; ++u) put(frame, u, v, kSky);
            continue;
        }
        const double forward = cam.mount_height * focal / below;
        if (forward > cam.range) {
            for (int u = 0; u < cam.width; ++u) put(frame, u, v, kFarGrass);
            continue;
        }
        for (int u = 0; u < cam.width; ++u) {
            const double right = (u + 0.5 - cam.width / 2.0) * forward / focal;
            const Point2 ground{ego.x + forward * c + right * s, ego.y + forward * s - right * c};
            const double d = std::abs(track.project_near(ground, ego_s, 10.0, cam.range + 15.0).cte);
            put(frame, u, v, d < hw - kEdgeHalfWidth ? kRoad : d <= hw + kEdgeHalfWidth ? kLaneEdge : kGrass);
        }
    }

    if (auto vs = visible_sign(ego, ego_s, track, cam)) {
        draw_sign_glyph(frame, vs->cx, vs->cy, vs->radius_px, static_cast<std::uint8_t>(vs->sign.limit_kmh));
    }
    return frame;
}

}  // namespace dtwin::environment
