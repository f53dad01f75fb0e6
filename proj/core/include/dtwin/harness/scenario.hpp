#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtwin/backplane/session.hpp"
#include "dtwin/environment/camera.hpp"
#include "dtwin/environment/track.hpp"
#include "dtwin/perception/pi_controller.hpp"
#include "dtwin/steering/pure_pursuit.hpp"
#include "dtwin/vehicle/vehicle_model.hpp"

namespace dtwin::harness {

enum class Role { Vehicle, Environment, Steering, Perception };

inline constexpr Role kAllRoles[] = {Role::Vehicle, Role::Environment, Role::Steering, Role::Perception};

std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

struct TrackSpec {
    std::vector<Point2> waypoints;
    double lane_half_width = 1.75;
    bool closed = false;
    friend bool operator==(const TrackSpec&, const TrackSpec&) = default;
};

struct SteeringGains {
    double lookahead_gain = 0.6;
    double min_lookahead = 3.0;
    double max_lookahead = 12.0;
    friend bool operator==(const SteeringGains&, const SteeringGains&) = default;
};

struct InitialState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
    friend bool operator==(const InitialState&, const InitialState&) = default;
};

/// Everything a run needs, with defaults resolved.
struct Scenario {
    std::uint64_t dt_ns = 10'000'000;
    double duration_s = 0.0;
    std::vector<backplane::RosterEntry> roster = default_roster();
    TrackSpec track;
    std::vector<environment::SpeedSign> signs;
    vehicle::VehicleParams vehicle;
    SteeringGains steering;
    perception::PiParams speed_control;
    environment::CameraParams camera;
    InitialState initial;
    std::optional<std::uint64_t> seed;
    std::string trace_path = "trace.csv";
    double barrier_timeout_s = 30.0;
    double join_timeout_s = 30.0;

    static std::vector<backplane::RosterEntry> default_roster();

    /// duration / dt; throws ValidationError when it is not an integer.
    std::uint64_t total_steps() const;
    environment::Track make_track() const;
    steering::PurePursuitParams pure_pursuit() const;
    vehicle::VehicleState initial_state() const;
    backplane::SessionConfig session_config() const;
    /// Throws RosterMismatch if `role` has no roster entry.
    wire::MacAddress mac_of(Role role) const;

    /// Collects every violated invariant into one ValidationError.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses YAML text; see docs/scenario.md for the schema. Throws ParseError
/// with line/field diagnostics, or ValidationError listing every problem.
Scenario parse_scenario_text(std::string_view text);
Scenario parse_scenario(const std::string& path);

/// Fully resolved YAML (explicit waypoints, every default spelled out).
/// parse_scenario_text(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace dtwin::harness
