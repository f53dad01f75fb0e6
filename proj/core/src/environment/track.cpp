#include "dtwin/environment/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dtwin/error.hpp"

namespace dtwin::environment {

bool is_supported_limit(int limit_kmh) noexcept {
    return limit_kmh >= 30 && limit_kmh <= 80 && limit_kmh % 10 == 0;
}

Track::Track(std::vector<Point2> waypoints, double lane_half_width, bool closed, std::vector<SpeedSign> signs)
    : waypoints_(std::move(waypoints)), lane_half_width_(lane_half_width), closed_(closed), signs_(std::move(signs)) {
    std::vector<std::string> bad;
    if (waypoints_.size() < 2 || (closed_ && waypoints_.size() < 3)) {
        throw Error(ErrorKind::ValidationError,
                    fmt::format("track needs at least {} waypoints, got {}", closed_ ? 3 : 2, waypoints_.size()));
    }
    if (!(lane_half_width_ > 0.0)) bad.push_back(fmt::format("lane_half_width must be positive (got {})", lane_half_width_));

    const std::size_t segments = closed_ ? waypoints_.size() : waypoints_.size() - 1;
    cumulative_.assign(1, 0.0);
    for (std::size_t i = 0; i < segments; ++i) {
        const Point2 a = segment_start(i);
        const Point2 b = segment_end(i);
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (!(len > 0.0) || !std::isfinite(len)) {
            bad.push_back(fmt::format("waypoints {} and {} coincide", i, (i + 1) % waypoints_.size()));
        }
        cumulative_.push_back(cumulative_.back() + len);
    }

    for (std::size_t i = 0; i < signs_.size(); ++i) {
        const auto& sg = signs_[i];
        if (!(sg.s >= 0.0 && sg.s <= length())) {
            bad.push_back(fmt::format("sign {} ({} km/h) at s={} is outside [0, {}]", i, sg.limit_kmh, sg.s, length()));
        }
        if (!is_supported_limit(sg.limit_kmh)) {
            bad.push_back(fmt::format("sign {} has unsupported limit {} km/h", i, sg.limit_kmh));
        }
    }
    if (!bad.empty()) throw Error(ErrorKind::ValidationError, fmt::format("{}", fmt::join(bad, "; ")));
}

double Track::normalize_s(double s) const noexcept {
    const double len = length();
    if (closed_) {
        double w = std::fmod(s, len);
        if (w < 0.0) w += len;
        return w >= len ? 0.0 : w;
    }
    return std::clamp(s, 0.0, len);
}

std::size_t Track::segment_at(double s) const noexcept {
    // First segment whose end lies beyond s.
    auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), s);
    if (it == cumulative_.end()) return segment_count() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin()) - 1;
}

Point2 Track::point_at(double s) const noexcept {
    s = normalize_s(s);
    const std::size_t i = segment_at(s);
    const Point2 a = segment_start(i);
    const Point2 b = segment_end(i);
    const double t = (s - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

double Track::heading_at(double s) const noexcept {
    const std::size_t i = segment_at(normalize_s(s));
    const Point2 a = segment_start(i);
    const Point2 b = segment_end(i);
    return std::atan2(b.y - a.y, b.x - a.x);
}

void Track::project_segment(std::size_t i, Point2 p, double& best_d2, TrackProjection& best) const noexcept {
    const Point2 a = segment_start(i);
    const Point2 b = segment_end(i);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double qx = a.x + t * dx;
    const double qy = a.y + t * dy;
    const double d2 = (p.x - qx) * (p.x - qx) + (p.y - qy) * (p.y - qy);
    if (d2 < best_d2) {
        best_d2 = d2;
        const double cross = dx * (p.y - a.y) - dy * (p.x - a.x);
        const double dist = std::sqrt(d2);
        best.s = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
        best.cte = cross >= 0.0 ? dist : -dist;
    }
}

TrackProjection Track::project(Point2 p) const noexcept {
    double best_d2 = std::numeric_limits<double>::infinity();
    TrackProjection best;
    for (std::size_t i = 0; i < segment_count(); ++i) project_segment(i, p, best_d2, best);
    if (closed_ && best.s >= length()) best.s = 0.0;
    return best;
}

TrackProjection Track::project_near(Point2 p, double s_hint, double behind, double ahead) const noexcept {
    const double span = behind + ahead;
    if (span >= length()) return project(p);

    double start = s_hint - behind;
    if (!closed_) start = std::max(0.0, start);
    std::size_t i = segment_at(normalize_s(start));
    const double end_covered = span + (normalize_s(start) - cumulative_[i]);

    double best_d2 = std::numeric_limits<double>::infinity();
    TrackProjection best;
    double covered = 0.0;
    for (std::size_t visited = 0; visited < segment_count(); ++visited) {
        project_segment(i, p, best_d2, best);
        covered += cumulative_[i + 1] - cumulative_[i];
        if (covered >= end_covered) break;
        if (++i == segment_count()) {
            if (!closed_) break;
            i = 0;
        }
    }
    if (closed_ && best.s >= length()) best.s = 0.0;
    return best;
}

double Track::distance_ahead(double s_from, double s_to) const noexcept {
    if (!closed_) return s_to - s_from;
    double d = std::fmod(s_to - s_from, length());
    if (d < 0.0) d += length();
    return d;
}

std::vector<Point2> build_centerline(const TrackStart& start, std::span<const TrackPiece> pieces, double spacing) {
    if (!(spacing > 0.0)) throw Error(ErrorKind::ValidationError, "centerline spacing must be positive");
    std::vector<Point2> pts{{start.x, start.y}};
    double x = start.x;
    double y = start.y;
    double heading = start.heading;

    for (const auto& piece : pieces) {
        if (piece.kind == TrackPiece::Kind::Straight) {
            if (!(piece.length > 0.0)) throw Error(ErrorKind::ValidationError, "straight length must be positive");
            const auto n = static_cast<int>(std::max(1.0, std::ceil(piece.length / spacing)));
            for (int k = 1; k <= n; ++k) {
                const double d = piece.length * k / n;
                pts.push_back({x + d * std::cos(heading), y + d * std::sin(heading)});
            }
            x += piece.length * std::cos(heading);
            y += piece.length * std::sin(heading);
        } else {
            if (!(piece.radius > 0.0) || piece.angle == 0.0) {
                throw Error(ErrorKind::ValidationError, "arc needs a positive radius and a non-zero angle");
            }
            const double side = piece.angle > 0.0 ? 1.0 : -1.0;
            // Centre sits on the inside of the turn.
            const double cx = x - side * piece.radius * std::sin(heading);
            const double cy = y + side * piece.radius * std::cos(heading);
            const double arc_len = piece.radius * std::abs(piece.angle);
            const auto n = static_cast<int>(std::max(1.0, std::ceil(arc_len / spacing)));
            for (int k = 1; k <= n; ++k) {
                const double h = heading + piece.angle * k / n;
                pts.push_back({cx + side * piece.radius * std::sin(h), cy - side * piece.radius * std::cos(h)});
            }
            heading += piece.angle;
            x = pts.back().x;
            y = pts.back().y;
        }
    }
    return pts;
}

}  // namespace dtwin::environment
