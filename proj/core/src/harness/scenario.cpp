#include "dtwin/harness/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

#include "dtwin/error.hpp"

namespace dtwin::harness {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string where(const YAML::Node& node, std::string_view field) {
    const YAML::Mark m = node.Mark();
    if (m.line >= 0) return fmt::format("line {}, field '{}'", m.line + 1, field);
    return fmt::format("field '{}'", field);
}

[[noreturn]] void parse_fail(const YAML::Node& node, std::string_view field, std::string_view what) {
    throw Error(ErrorKind::ParseError, fmt::format("{}: {}", where(node, field), what));
}

void require_map(const YAML::Node& node, std::string_view field) {
    if (!node.IsMap()) parse_fail(node, field, "expected a mapping");
}

void check_keys(const YAML::Node& node, std::string_view field, std::initializer_list<std::string_view> allowed) {
    require_map(node, field);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            parse_fail(kv.first, field.empty() ? key : fmt::format("{}.{}", field, key),
                       fmt::format("unknown key (allowed: {})", fmt::join(allowed, ", ")));
        }
    }
}

template <class T>
T scalar(const YAML::Node& node, std::string_view field, std::string_view expected) {
    if (!node.IsScalar()) parse_fail(node, field, fmt::format("expected {}", expected));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        parse_fail(node, field, fmt::format("expected {}, got '{}'", expected, node.Scalar()));
    }
}

double number(const YAML::Node& node, std::string_view field) { return scalar<double>(node, field, "a number"); }

// Overwrites `out` only when `key` is present.
void opt_number(const YAML::Node& parent, const char* key, std::string_view path, double& out) {
    if (const auto n = parent[key]) out = number(n, fmt::format("{}.{}", path, key));
}

Point2 point(const YAML::Node& node, std::string_view field) {
    if (!node.IsSequence() || node.size() != 2) parse_fail(node, field, "expected [x, y]");
    return {number(node[0], field), number(node[1], field)};
}

std::vector<Point2> parse_pieces(const YAML::Node& track) {
    environment::TrackStart start;
    double spacing = 1.0;
    if (const auto s = track["start"]) {
        check_keys(s, "track.start", {"x", "y", "heading_deg"});
        opt_number(s, "x", "track.start", start.x);
        opt_number(s, "y", "track.start", start.y);
        double deg = 0.0;
        opt_number(s, "heading_deg", "track.start", deg);
        start.heading = deg * kDegToRad;
    }
    opt_number(track, "spacing", "track", spacing);

    const YAML::Node list = track["pieces"];
    if (!list.IsSequence()) parse_fail(list, "track.pieces", "expected a list");
    std::vector<environment::TrackPiece> pieces;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const YAML::Node p = list[i];
        const std::string field = fmt::format("track.pieces[{}]", i);
        check_keys(p, field, {"straight", "arc"});
        if (p.size() != 1) parse_fail(p, field, "expected exactly one of 'straight' or 'arc'");
        environment::TrackPiece piece;
        if (const auto st = p["straight"]) {
            piece.kind = environment::TrackPiece::Kind::Straight;
            piece.length = number(st, field + ".straight");
        } else {
            const auto arc = p["arc"];
            check_keys(arc, field + ".arc", {"radius", "angle_deg"});
            if (!arc["radius"] || !arc["angle_deg"]) parse_fail(arc, field + ".arc", "needs radius and angle_deg");
            piece.kind = environment::TrackPiece::Kind::Arc;
            piece.radius = number(arc["radius"], field + ".arc.radius");
            piece.angle = number(arc["angle_deg"], field + ".arc.angle_deg") * kDegToRad;
        }
        pieces.push_back(piece);
    }
    return environment::build_centerline(start, pieces, spacing);
}

TrackSpec parse_track(const YAML::Node& node) {
    check_keys(node, "track", {"waypoints", "pieces", "start", "spacing", "lane_half_width", "closed"});
    TrackSpec t;
    opt_number(node, "lane_half_width", "track", t.lane_half_width);
    if (const auto c = node["closed"]) t.closed = scalar<bool>(c, "track.closed", "true or false");

    const bool has_wp = static_cast<bool>(node["waypoints"]);
    const bool has_pieces = static_cast<bool>(node["pieces"]);
    if (has_wp == has_pieces) parse_fail(node, "track", "give exactly one of 'waypoints' or 'pieces'");
    if (has_wp) {
        const YAML::Node list = node["waypoints"];
        if (!list.IsSequence()) parse_fail(list, "track.waypoints", "expected a list of [x, y]");
        for (std::size_t i = 0; i < list.size(); ++i) {
            t.waypoints.push_back(point(list[i], fmt::format("track.waypoints[{}]", i)));
        }
    } else {
        t.waypoints = parse_pieces(node);
        // A closed loop built from pieces ends where it started.
        if (t.closed && t.waypoints.size() > 2) {
            const Point2 a = t.waypoints.front();
            const Point2 b = t.waypoints.back();
            if (std::hypot(a.x - b.x, a.y - b.y) < 1e-6) t.waypoints.pop_back();
        }
    }
    return t;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, fmt::format("cannot read scenario '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view role_name(Role role) noexcept {
    switch (role) {
        case Role::Vehicle: return "vehicle";
        case Role::Environment: return "environment";
        case Role::Steering: return "steering";
        case Role::Perception: return "perception";
    }
    return "unknown";
}

std::optional<Role> parse_role(std::string_view name) noexcept {
    for (Role r : kAllRoles) {
        if (role_name(r) == name) return r;
    }
    return std::nullopt;
}

std::vector<backplane::RosterEntry> Scenario::default_roster() {
    std::vector<backplane::RosterEntry> roster;
    std::uint16_t index = 1;
    for (Role r : kAllRoles) roster.push_back({std::string(role_name(r)), wire::MacAddress::local(index++)});
    return roster;
}

std::uint64_t Scenario::total_steps() const {
    if (dt_ns == 0) throw Error(ErrorKind::ValidationError, "dt must be positive");
    if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
        throw Error(ErrorKind::ValidationError, fmt::format("duration_s must be >= 0 (got {})", duration_s));
    }
    const auto duration_ns = static_cast<std::uint64_t>(std::llround(duration_s * 1e9));
    if (duration_ns % dt_ns != 0) {
        throw Error(ErrorKind::ValidationError,
                    fmt::format("duration {} s is not a whole number of {} ns steps", duration_s, dt_ns));
    }
    return duration_ns / dt_ns;
}

environment::Track Scenario::make_track() const {
    return environment::Track(track.waypoints, track.lane_half_width, track.closed, signs);
}

steering::PurePursuitParams Scenario::pure_pursuit() const {
    return {steering.lookahead_gain, steering.min_lookahead, steering.max_lookahead, vehicle.wheelbase,
            vehicle.max_steer};
}

vehicle::VehicleState Scenario::initial_state() const {
    return {initial.x, initial.y, initial.heading, initial.speed, 0.0};
}

backplane::SessionConfig Scenario::session_config() const {
    backplane::SessionConfig c;
    c.dt_ns = dt_ns;
    c.total_steps = total_steps();
    c.roster = roster;
    c.barrier_timeout = std::chrono::milliseconds(std::llround(barrier_timeout_s * 1000.0));
    c.join_timeout = std::chrono::milliseconds(std::llround(join_timeout_s * 1000.0));
    return c;
}

wire::MacAddress Scenario::mac_of(Role role) const {
    for (const auto& e : roster) {
        if (e.name == role_name(role)) return e.mac;
    }
    throw Error(ErrorKind::RosterMismatch, fmt::format("roster has no '{}' client", role_name(role)));
}

void Scenario::validate() const {
    std::vector<std::string> bad;
    const auto collect = [&](auto&& check) {
        try {
            check();
        } catch (const Error& e) {
            bad.push_back(e.detail());
        }
    };
    collect([&] { (void)total_steps(); });
    std::optional<environment::Track> trk;
    collect([&] { trk.emplace(make_track()); });
    collect([&] { vehicle.validate(); });
    collect([&] { pure_pursuit().validate(); });
    collect([&] { session_config().validate(); });

    if (camera.width <= 0 || camera.height <= 0 || camera.width > 4096 || camera.height > 4096) {
        bad.push_back(fmt::format("camera size {}x{} out of range", camera.width, camera.height));
    }
    if (!(camera.fov > 0.0 && camera.fov < std::numbers::pi)) bad.emplace_back("camera.fov must be in (0, pi)");
    if (!(camera.range > 0.0)) bad.emplace_back("camera.range must be positive");
    if (!(camera.mount_height > 0.0)) bad.emplace_back("camera.mount_height must be positive");
    if (!(camera.noise >= 0.0 && camera.noise <= 255.0)) bad.emplace_back("camera.noise must be in [0, 255]");
    if (!(speed_control.kp >= 0.0) || !(speed_control.ki >= 0.0)) bad.emplace_back("speed_control gains must be >= 0");
    if (!(speed_control.initial_v_ref >= 0.0)) bad.emplace_back("speed_control.initial_v_ref must be >= 0");
    if (!(initial.speed >= 0.0)) bad.emplace_back("initial.speed must be >= 0");
    if (!(barrier_timeout_s > 0.0) || !(join_timeout_s > 0.0)) bad.emplace_back("timeouts must be positive");

    if (trk) {
        const auto proj = trk->project({initial.x, initial.y});
        if (!(std::abs(proj.cte) < trk->lane_half_width())) {
            bad.push_back(fmt::format("initial pose ({}, {}) is {:.3f} m off the centerline, outside the lane",
                                      initial.x, initial.y, proj.cte));
        }
    }
    if (!bad.empty()) throw Error(ErrorKind::ValidationError, fmt::format("{}", fmt::join(bad, "; ")));
}

Scenario parse_scenario_text(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorKind::ParseError, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
    }
    check_keys(root, "", {"dt_ms", "dt_ns", "duration_s", "trace", "seed", "barrier_timeout_s", "join_timeout_s",
                          "roster", "track", "signs", "vehicle", "steering", "speed_control", "camera", "initial"});

    Scenario s;
    if (root["dt_ms"] && root["dt_ns"]) parse_fail(root, "dt_ms", "give dt_ms or dt_ns, not both");
    if (const auto n = root["dt_ns"]) s.dt_ns = scalar<std::uint64_t>(n, "dt_ns", "an integer");
    if (const auto n = root["dt_ms"]) {
        const double ms = number(n, "dt_ms");
        if (!(ms > 0.0)) parse_fail(n, "dt_ms", "must be positive");
        s.dt_ns = static_cast<std::uint64_t>(std::llround(ms * 1e6));
    }
    if (!root["duration_s"]) parse_fail(root, "duration_s", "is required");
    s.duration_s = number(root["duration_s"], "duration_s");
    if (const auto n = root["trace"]) s.trace_path = scalar<std::string>(n, "trace", "a path");
    if (const auto n = root["seed"]) s.seed = scalar<std::uint64_t>(n, "seed", "an unsigned integer");
    opt_number(root, "barrier_timeout_s", "", s.barrier_timeout_s);
    opt_number(root, "join_timeout_s", "", s.join_timeout_s);

    if (const auto r = root["roster"]) {
        if (!r.IsSequence()) parse_fail(r, "roster", "expected a list of {name, mac}");
        s.roster.clear();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string field = fmt::format("roster[{}]", i);
            check_keys(r[i], field, {"name", "mac"});
            if (!r[i]["name"] || !r[i]["mac"]) parse_fail(r[i], field, "needs name and mac");
            backplane::RosterEntry e;
            e.name = scalar<std::string>(r[i]["name"], field + ".name", "a string");
            try {
                e.mac = wire::MacAddress::parse(scalar<std::string>(r[i]["mac"], field + ".mac", "a MAC address"));
            } catch (const Error& err) {
                parse_fail(r[i]["mac"], field + ".mac", err.detail());
            }
            s.roster.push_back(std::move(e));
        }
    }

    if (!root["track"]) parse_fail(root, "track", "is required");
    s.track = parse_track(root["track"]);

    if (const auto sg = root["signs"]) {
        if (!sg.IsSequence()) parse_fail(sg, "signs", "expected a list of {s, limit_kmh}");
        for (std::size_t i = 0; i < sg.size(); ++i) {
            const std::string field = fmt::format("signs[{}]", i);
            check_keys(sg[i], field, {"s", "limit_kmh"});
            if (!sg[i]["s"] || !sg[i]["limit_kmh"]) parse_fail(sg[i], field, "needs s and limit_kmh");
            s.signs.push_back({number(sg[i]["s"], field + ".s"),
                               scalar<int>(sg[i]["limit_kmh"], field + ".limit_kmh", "an integer")});
        }
    }

    if (const auto v = root["vehicle"]) {
        check_keys(v, "vehicle", {"mass", "wheelbase", "max_steer", "max_drive_force", "max_brake_force", "drag",
                                  "rolling", "gravity"});
        opt_number(v, "mass", "vehicle", s.vehicle.mass);
        opt_number(v, "wheelbase", "vehicle", s.vehicle.wheelbase);
        opt_number(v, "max_steer", "vehicle", s.vehicle.max_steer);
        opt_number(v, "max_drive_force", "vehicle", s.vehicle.max_drive_force);
        opt_number(v, "max_brake_force", "vehicle", s.vehicle.max_brake_force);
        opt_number(v, "drag", "vehicle", s.vehicle.drag);
        opt_number(v, "rolling", "vehicle", s.vehicle.rolling);
        opt_number(v, "gravity", "vehicle", s.vehicle.gravity);
    }
    if (const auto st = root["steering"]) {
        check_keys(st, "steering", {"lookahead_gain", "min_lookahead", "max_lookahead"});
        opt_number(st, "lookahead_gain", "steering", s.steering.lookahead_gain);
        opt_number(st, "min_lookahead", "steering", s.steering.min_lookahead);
        opt_number(st, "max_lookahead", "steering", s.steering.max_lookahead);
    }
    if (const auto c = root["camera"]) {
        check_keys(c, "camera", {"width", "height", "fov", "range", "mount_height", "noise"});
        if (c["width"]) s.camera.width = scalar<int>(c["width"], "camera.width", "an integer");
        if (c["height"]) s.camera.height = scalar<int>(c["height"], "camera.height", "an integer");
        opt_number(c, "fov", "camera", s.camera.fov);
        opt_number(c, "range", "camera", s.camera.range);
        opt_number(c, "mount_height", "camera", s.camera.mount_height);
        opt_number(c, "noise", "camera", s.camera.noise);
    }

    // Initial pose defaults to the start of the centerline, facing along it.
    if (s.track.waypoints.size() >= 2) {
        const Point2 a = s.track.waypoints[0];
        const Point2 b = s.track.waypoints[1];
        s.initial.x = a.x;
        s.initial.y = a.y;
        s.initial.heading = std::atan2(b.y - a.y, b.x - a.x);
    }
    if (const auto in = root["initial"]) {
        check_keys(in, "initial", {"x", "y", "heading", "speed"});
        opt_number(in, "x", "initial", s.initial.x);
        opt_number(in, "y", "initial", s.initial.y);
        opt_number(in, "heading", "initial", s.initial.heading);
        opt_number(in, "speed", "initial", s.initial.speed);
    }

    s.speed_control.initial_v_ref = s.initial.speed;
    if (const auto sc = root["speed_control"]) {
        check_keys(sc, "speed_control", {"kp", "ki", "initial_v_ref"});
        opt_number(sc, "kp", "speed_control", s.speed_control.kp);
        opt_number(sc, "ki", "speed_control", s.speed_control.ki);
        opt_number(sc, "initial_v_ref", "speed_control", s.speed_control.initial_v_ref);
    }

    s.validate();
    return s;
}

Scenario parse_scenario(const std::string& path) { return parse_scenario_text(read_file(path)); }

std::string serialize_scenario(const Scenario& s) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "dt_ns" << YAML::Value << s.dt_ns;
    out << YAML::Key << "duration_s" << YAML::Value << s.duration_s;
    out << YAML::Key << "trace" << YAML::Value << s.trace_path;
    if (s.seed) out << YAML::Key << "seed" << YAML::Value << *s.seed;
    out << YAML::Key << "barrier_timeout_s" << YAML::Value << s.barrier_timeout_s;
    out << YAML::Key << "join_timeout_s" << YAML::Value << s.join_timeout_s;

    out << YAML::Key << "roster" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : s.roster) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << e.name << YAML::Key << "mac"
            << YAML::Value << e.mac.to_string() << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "track" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "lane_half_width" << YAML::Value << s.track.lane_half_width;
    out << YAML::Key << "closed" << YAML::Value << s.track.closed;
    out << YAML::Key << "waypoints" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : s.track.waypoints) out << YAML::Flow << YAML::BeginSeq << p.x << p.y << YAML::EndSeq;
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "signs" << YAML::Value << YAML::BeginSeq;
    for (const auto& sg : s.signs) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "s" << YAML::Value << sg.s << YAML::Key << "limit_kmh"
            << YAML::Value << sg.limit_kmh << YAML::EndMap;
    }
    out << YAML::EndSeq;

    const auto& v = s.vehicle;
    out << YAML::Key << "vehicle" << YAML::Value << YAML::BeginMap << YAML::Key << "mass" << YAML::Value << v.mass
        << YAML::Key << "wheelbase" << YAML::Value << v.wheelbase << YAML::Key << "max_steer" << YAML::Value
        << v.max_steer << YAML::Key << "max_drive_force" << YAML::Value << v.max_drive_force << YAML::Key
        << "max_brake_force" << YAML::Value << v.max_brake_force << YAML::Key << "drag" << YAML::Value << v.drag
        << YAML::Key << "rolling" << YAML::Value << v.rolling << YAML::Key << "gravity" << YAML::Value << v.gravity
        << YAML::EndMap;

    out << YAML::Key << "steering" << YAML::Value << YAML::BeginMap << YAML::Key << "lookahead_gain" << YAML::Value
        << s.steering.lookahead_gain << YAML::Key << "min_lookahead" << YAML::Value << s.steering.min_lookahead
        << YAML::Key << "max_lookahead" << YAML::Value << s.steering.max_lookahead << YAML::EndMap;

    out << YAML::Key << "speed_control" << YAML::Value << YAML::BeginMap << YAML::Key << "kp" << YAML::Value
        << s.speed_control.kp << YAML::Key << "ki" << YAML::Value << s.speed_control.ki << YAML::Key
        << "initial_v_ref" << YAML::Value << s.speed_control.initial_v_ref << YAML::EndMap;

    const auto& c = s.camera;
    out << YAML::Key << "camera" << YAML::Value << YAML::BeginMap << YAML::Key << "width" << YAML::Value << c.width
        << YAML::Key << "height" << YAML::Value << c.height << YAML::Key << "fov" << YAML::Value << c.fov
        << YAML::Key << "range" << YAML::Value << c.range << YAML::Key << "mount_height" << YAML::Value
        << c.mount_height << YAML::Key << "noise" << YAML::Value << c.noise << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap << YAML::Key << "x" << YAML::Value
        << s.initial.x << YAML::Key << "y" << YAML::Value << s.initial.y << YAML::Key << "heading" << YAML::Value
        << s.initial.heading << YAML::Key << "speed" << YAML::Value << s.initial.speed << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace dtwin::harness
