#pragma once

#include <span>
#include <vector>

#include "dtwin/geometry.hpp"

namespace dtwin::environment {

struct SpeedSign {
    double s = 0.0;     // arc length along the centerline, m
    int limit_kmh = 0;  // one of 30..80 in steps of 10
    friend bool operator==(const SpeedSign&, const SpeedSign&) = default;
};

bool is_supported_limit(int limit_kmh) noexcept;

struct TrackProjection {
    double s = 0.0;    // arc length of the nearest centerline point
    double cte = 0.0;  // signed lateral offset, positive left of travel direction
};

/// Piecewise-linear centerline with cumulative arc length. A closed track
/// joins the last waypoint back to the first; arc length then wraps.
class Track {
public:
    /// Throws ValidationError (fewer than 2 waypoints, zero-length segments,
    /// non-positive lane half-width, signs off the track or unsupported).
    Track(std::vector<Point2> waypoints, double lane_half_width, bool closed = false,
          std::vector<SpeedSign> signs = {});

    double length() const noexcept { return cumulative_.back(); }
    double lane_half_width() const noexcept { return lane_half_width_; }
    bool closed() const noexcept { return closed_; }
    const std::vector<Point2>& waypoints() const noexcept { return waypoints_; }
    const std::vector<SpeedSign>& signs() const noexcept { return signs_; }
    std::size_t segment_count() const noexcept { return cumulative_.size() - 1; }

    /// Wraps s into [0, length) on closed tracks, clamps into [0, length] otherwise.
    double normalize_s(double s) const noexcept;
    Point2 point_at(double s) const noexcept;
    /// Travel direction at s.
    double heading_at(double s) const noexcept;

    /// Nearest centerline point by exhaustive scan over all segments.
    TrackProjection project(Point2 p) const noexcept;
    /// Same, restricted to segments overlapping [s_hint - behind, s_hint + ahead].
    TrackProjection project_near(Point2 p, double s_hint, double behind, double ahead) const noexcept;

    /// Forward arc distance from s_from to s_to (wraps on closed tracks,
    /// negative when s_to lies behind on an open track).
    double distance_ahead(double s_from, double s_to) const noexcept;

private:
    Point2 segment_start(std::size_t i) const noexcept { return waypoints_[i]; }
    Point2 segment_end(std::size_t i) const noexcept { return waypoints_[(i + 1) % waypoints_.size()]; }
    std::size_t segment_at(double s) const noexcept;
    void project_segment(std::size_t i, Point2 p, double& best_d2, TrackProjection& best) const noexcept;

    std::vector<Point2> waypoints_;
    std::vector<double> cumulative_;  // size == segment_count + 1
    double lane_half_width_;
    bool closed_;
    std::vector<SpeedSign> signs_;
};

/// Building blocks for centerlines made of straights and constant-radius arcs.
struct TrackPiece {
    enum class Kind { Straight, Arc } kind = Kind::Straight;
    double length = 0.0;  // straight length, m
    double radius = 0.0;  // arc radius, m
    double angle = 0.0;   // arc turn, rad; positive turns left
    friend bool operator==(const TrackPiece&, const TrackPiece&) = default;
};

struct TrackStart {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    friend bool operator==(const TrackStart&, const TrackStart&) = default;
};

/// Samples the pieces every `spacing` metres (each piece gets at least one
/// segment and ends exactly on its analytic endpoint). The returned list
/// includes both the start and the final point.
std::vector<Point2> build_centerline(const TrackStart& start, std::span<const TrackPiece> pieces, double spacing);

}  // namespace dtwin::environment
