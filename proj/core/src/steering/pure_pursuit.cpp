#include "dtwin/steering/pure_pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dtwin/error.hpp"

namespace dtwin::steering {

void PurePursuitParams::validate() const {
    std::vector<std::string> bad;
    if (!(lookahead_gain >= 0.0)) bad.emplace_back("steering.lookahead_gain must be >= 0");
    if (!(min_lookahead > 0.0)) bad.emplace_back("steering.min_lookahead must be positive");
    if (!(max_lookahead >= min_lookahead)) bad.emplace_back("steering.max_lookahead must be >= min_lookahead");
    if (!(wheelbase > 0.0)) bad.emplace_back("steering.wheelbase must be positive");
    if (!(max_steer > 0.0 && max_steer < std::numbers::pi / 2)) bad.emplace_back("steering.max_steer must be in (0, pi/2)");
    if (!bad.empty()) throw Error(ErrorKind::ValidationError, fmt::format("{}", fmt::join(bad, "; ")));
}

double PurePursuitParams::lookahead(double speed) const noexcept {
    return std::clamp(lookahead_gain * speed, min_lookahead, max_lookahead);
}

Point2 lookahead_point(double s_ego, double distance, const environment::Track& track) noexcept {
    const double s = s_ego + distance;
    return track.point_at(track.closed() ? s : std::min(s, track.length()));
}

double pure_pursuit_steer(const vehicle::VehicleState& ego, Point2 goal, const PurePursuitParams& p) noexcept {
    const double ld = p.lookahead(ego.speed);
    const double alpha = wrap_angle(std::atan2(goal.y - ego.y, goal.x - ego.x) - ego.heading);
    const double delta = std::atan(2.0 * p.wheelbase * std::sin(alpha) / ld);
    return std::clamp(delta, -p.max_steer, p.max_steer);
}

}  // namespace dtwin::steering
