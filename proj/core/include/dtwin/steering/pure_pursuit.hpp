#pragma once

#include "dtwin/environment/track.hpp"
#include "dtwin/geometry.hpp"
#include "dtwin/vehicle/vehicle_model.hpp"

namespace dtwin::steering {

struct PurePursuitParams {
    double lookahead_gain = 0.6;  // s
    double min_lookahead = 3.0;   // m
    double max_lookahead = 12.0;  // m
    double wheelbase = 2.5;       // m, must match the vehicle
    double max_steer = 0.5;       // rad, must match the vehicle

    /// Throws ValidationError.
    void validate() const;
    /// clamp(gain * v, min, max).
    double lookahead(double speed) const noexcept;
    friend bool operator==(const PurePursuitParams&, const PurePursuitParams&) = default;
};

/// Centerline point at s_ego + distance (clamped to the end of an open track,
/// wrapped on a closed one).
Point2 lookahead_point(double s_ego, double distance, const environment::Track& track) noexcept;

/// delta = clamp(atan(2 L sin(alpha) / Ld), +-max_steer) where alpha is the goal
/// bearing relative to the heading and Ld = lookahead(v).
double pure_pursuit_steer(const vehicle::VehicleState& ego, Point2 goal, const PurePursuitParams& p) noexcept;

}  // namespace dtwin::steering
