// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "../unit/session_fixture.hpp"
#include "dtwin/environment/camera.hpp"
#include "dtwin/environment/sign_glyph.hpp"
#include "dtwin/error.hpp"
#include "dtwin/harness/runner.hpp"
#include "dtwin/harness/scenario.hpp"
#include "dtwin/harness/summary.hpp"
#include "dtwin/perception/pi_controller.hpp"
#include "dtwin/perception/sign_detector.hpp"
#include "dtwin/steering/pure_pursuit.hpp"
#include "dtwin/vehicle/vehicle_model.hpp"
#include "dtwin/wire/crc32.hpp"
#include "dtwin/wire/frame.hpp"

using namespace dtwin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

fs::path out_dir() {
    const auto d = fs::temp_directory_path() / "dtwin-acceptance";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

harness::Scenario scenario(const char* file) { return harness::parse_scenario(fs::path(DTWIN_SCENARIO_DIR) / file); }

// Index of the first row from which speed stays within `band` of target up to `end`.
std::optional<std::size_t> holds_from(const harness::Trace& t, std::size_t begin, std::size_t end, double target,
                                      double band) {
    std::optional<std::size_t> from;
    for (std::size_t i = end; i-- > begin;) {
        if (std::abs(t.rows[i].speed - target) > band * target) break;
        from = i;
    }
    return from;
}

std::size_t row_of_step(const harness::Trace& t, std::uint64_t step) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].step == step) return i;
    }
    return t.rows.size();
}

std::string reference_trace_in_process;

Outcome sign_recognition() {
    Outcome o;
    const auto s = scenario("reference_signs.yaml");
    harness::RunOptions opts;
    opts.trace_path = (out_dir() / "reference_a.csv").string();
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = harness::run_in_process(s, opts);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    reference_trace_in_process = opts.trace_path;

    const auto trace = harness::read_trace(opts.trace_path);
    const auto sum = harness::summarize_trace(trace);
    const auto track = s.make_track();
    o.require(run.report.steps == 12000 && trace.rows.size() == 12000, "expected 12000 rows");
    o.require(sum.detections.size() >= 2, "fewer than two detections");
    if (sum.detections.size() < 2) return o;

    const auto& d40 = sum.detections[0];
    const auto& d60 = sum.detections[1];
    const double s40 = track.project({d40.x, d40.y}).s;
    o.require(d40.limit_kmh == 40, fmt::format("first detection {} km/h", d40.limit_kmh));
    o.require(s40 < 100.0, fmt::format("40 detected at s={:.1f}", s40));
    o.require(d60.limit_kmh == 60, fmt::format("second detection {} km/h", d60.limit_kmh));

    const std::size_t i40 = row_of_step(trace, d40.step), i60 = row_of_step(trace, d60.step);
    const std::size_t end60 = sum.detections.size() > 2 ? row_of_step(trace, sum.detections[2].step) : trace.rows.size();
    const auto settle40 = holds_from(trace, i40, i60, 40 / 3.6, 0.05);
    const auto settle60 = holds_from(trace, i60, end60, 60 / 3.6, 0.05);
    o.require(settle40.has_value(), "speed never holds 11.11 +-5% before the 60 sign");
    o.require(settle60.has_value(), "speed never holds 16.67 +-5% after the 60 sign");
    o.require(wall < 60.0, fmt::format("wall clock {:.1f} s", wall));
    if (o.pass) {
        o.detail = fmt::format("40 seen at s={:.1f} m (t={:.2f} s), within 5% after {:.2f} s; 60 seen at t={:.2f} s, "
                               "within 5% after {:.2f} s; wall {:.1f} s",
                               s40, d40.t_s, trace.rows[*settle40].t_s - d40.t_s, d60.t_s,
                               trace.rows[*settle60].t_s - d60.t_s, wall);
    }
    return o;
}

Outcome lane_keeping() {
    Outcome o;
    const auto s = scenario("curvy_lane_keeping.yaml");
    const auto track = s.make_track();
    // Tightest turn from the sampled centreline, via circumradius of each
    // consecutive point triple.
    double min_radius = 1e300;
    const auto& w = track.waypoints();
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        const double a = std::hypot(w[i].x - w[i - 1].x, w[i].y - w[i - 1].y);
        const double b = std::hypot(w[i + 1].x - w[i].x, w[i + 1].y - w[i].y);
        const double c = std::hypot(w[i + 1].x - w[i - 1].x, w[i + 1].y - w[i - 1].y);
        const double cross = std::abs((w[i].x - w[i - 1].x) * (w[i + 1].y - w[i].y) -
                                      (w[i].y - w[i - 1].y) * (w[i + 1].x - w[i].x));
        if (cross > 1e-12) min_radius = std::min(min_radius, a * b * c / (2 * cross));
    }
    o.require(min_radius < 30.5 && min_radius > 29.5, fmt::format("tightest radius {:.2f} m", min_radius));

    harness::RunOptions opts;
    opts.trace_path = (out_dir() / "curvy.csv").string();
    harness::run_in_process(s, opts);
    const auto trace = harness::read_trace(opts.trace_path);
    const auto sum = harness::summarize_trace(trace);
    o.require(!sum.detections.empty() && sum.detections[0].limit_kmh == 40, "40 km/h regime not entered");
    o.require(sum.max_abs_cte < 0.5, fmt::format("max |cte| {:.3f} m", sum.max_abs_cte));
    o.require(sum.max_abs_cte < track.lane_half_width(), "lane edge crossed");
    const double travelled = trace.rows.back().x;  // ends on the final straight
    o.require(travelled > 400, "vehicle never cleared the curves");
    if (o.pass) o.detail = fmt::format("max |cte| {:.3f} m over {} steps, tightest radius {:.1f} m", sum.max_abs_cte,
                                       trace.rows.size(), min_radius);
    return o;
}

Outcome determinism() {
    Outcome o;
    const auto s = scenario("reference_signs.yaml");
    harness::RunOptions again, multi;
    again.trace_path = (out_dir() / "reference_b.csv").string();
    multi.trace_path = (out_dir() / "reference_multi.csv").string();
    multi.client_executable = DTWIN_CLI_PATH;
    harness::run_in_process(s, again);
    harness::run_multi_process(s, multi);
    const auto a = slurp(reference_trace_in_process);
    o.require(!a.empty(), "no reference trace");
    o.require(a == slurp(again.trace_path), "two in-process runs differ");
    o.require(a == slurp(multi.trace_path), "in-process and multi-process traces differ");
    if (o.pass) o.detail = fmt::format("3 traces of {} bytes identical (2 in-process, 1 multi-process)", a.size());
    return o;
}

Outcome perception_codec() {
    Outcome o;
    int errors = 0, cases = 0, false_pos = 0;
    for (int limit : {30, 40, 50, 60, 70, 80}) {
        for (int d = 5; d <= 40; d += 5) {
            const environment::Track t({{0, 0}, {200, 0}}, 1.75, false, {{10.0 + d, limit}});
            const auto frame = environment::render_camera({10, 0, 0, 8, 0}, t, {});
            ++cases;
            if (perception::detect_sign(frame).limit_kmh != limit) ++errors;
        }
    }
    const environment::Track empty({{0, 0}, {200, 0}}, 1.75, false, {{195, 40}});
    int blank = 0;
    for (double x = 0; x < 150; x += 2.5) {
        ++blank;
        if (perception::detect_sign(environment::render_camera({x, 0, 0, 8, 0}, empty, {})).limit_kmh != 0) ++false_pos;
    }
    o.require(errors == 0, fmt::format("{} of {} grid cases misread", errors, cases));
    o.require(false_pos == 0, fmt::format("{} false positives", false_pos));
    if (o.pass) o.detail = fmt::format("{}/{} grid cases decoded, 0/{} sign-free frames detected", cases, cases, blank);
    return o;
}

std::uint32_t crc_oracle(std::span<const std::uint8_t> data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (auto b : data) {
        crc ^= b;
        for (int k = 0; k < 8; ++k) crc = (crc & 1) ? (crc >> 1) ^ 0xEDB88320u : crc >> 1;
    }
    return ~crc;
}

Outcome wire_integrity() {
    Outcome o;
    std::mt19937_64 rng(1);
    int roundtrip_fail = 0, undetected = 0, crc_fail = 0;
    for (int i = 0; i < 10000; ++i) {
        wire::MacAddress dst, src;
        for (auto& b : dst.octets) b = static_cast<std::uint8_t>(rng());
        for (auto& b : src.octets) b = static_cast<std::uint8_t>(rng());
        std::vector<std::uint8_t> payload(rng() % 1501);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        const auto f = wire::make_frame(dst, src, payload);
        auto bytes = wire::encode_frame(f);
        if (!(wire::decode_frame(bytes) == f)) ++roundtrip_fail;
        const std::size_t bit = rng() % (bytes.size() * 8);
        bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        try {
            wire::decode_frame(bytes);
            ++undetected;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::FcsMismatch) ++undetected;
        }
    }
    for (int i = 0; i < 100; ++i) {
        std::vector<std::uint8_t> data(rng() % 4096);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
        if (wire::crc32(data) != crc_oracle(data)) ++crc_fail;
    }
    const std::string check = "123456789";
    const auto check_bytes = std::span(reinterpret_cast<const std::uint8_t*>(check.data()), check.size());
    o.require(roundtrip_fail == 0, fmt::format("{} roundtrip failures", roundtrip_fail));
    o.require(undetected == 0, fmt::format("{} corruptions not rejected", undetected));
    o.require(crc_fail == 0, fmt::format("{} CRC mismatches vs oracle", crc_fail));
    o.require(wire::crc32(check_bytes) == 0xCBF43926u, "check value");
    if (o.pass) o.detail = "10000 frames roundtrip, 10000 single-bit flips rejected, 100/100 CRC oracle, 0xCBF43926";
    return o;
}

Outcome barrier_safety() {
    Outcome o;
    constexpr std::size_t kClients = 4;
    constexpr std::uint64_t kSteps = 200;
    std::vector<std::atomic<int>> finished(kSteps);
    std::atomic<int> early{0};
    std::atomic<std::uint64_t> stalled_ms{0};
    auto make = [&](bool slow) -> gateway::ComputeFn {
        return [&, slow](const gateway::Inbox& in) {
            if (in.step > 0 && finished[in.step - 1].load() != static_cast<int>(kClients)) ++early;
            if (slow && in.step % 10 == 3) {
                std::this_thread::sleep_for(std::chrono::milliseconds(15));
                stalled_ms += 15;
            }
            ++finished[in.step];
            return std::vector<gateway::Outgoing>{};
        };
    };
    struct Order : backplane::SessionObserver {
        std::map<std::uint64_t, std::size_t> dones;
        int violations = 0;
        void on_done(backplane::PortId, std::uint64_t k) override { ++dones[k]; }
        void on_grant(backplane::PortId, std::uint64_t k) override {
            if (k > 0 && dones[k - 1] != kClients) ++violations;
        }
    } order;
    dtwin::testing::ScriptedSession s{
        dtwin::testing::make_config(kClients, kSteps), {make(false), make(false), make(true), make(false)}, {&order}, {}};
    const auto r = s.run();
    o.require(r.steps == kSteps, "session did not complete");
    o.require(order.violations == 0, fmt::format("{} GRANT(k+1) before all DONE(k)", order.violations));
    o.require(early.load() == 0, fmt::format("{} clients ran ahead of a slow peer", early.load()));
    if (o.pass) o.detail = fmt::format("{} steps x {} clients, {} ms injected delay, no skew", kSteps, kClients,
                                       stalled_ms.load());
    return o;
}

Outcome controllers() {
    Outcome o;
    steering::PurePursuitParams pp;
    pp.lookahead_gain = 0.5;
    const double a = std::numbers::pi / 6;
    const double delta = steering::pure_pursuit_steer({0, 0, 0, 10, 0}, {5 * std::cos(a), 5 * std::sin(a)}, pp);
    o.require(std::abs(delta - std::atan(0.5)) < 1e-9, fmt::format("atan example gave {:.12f}", delta));
    for (double al = -1.5; al <= 1.5; al += 0.05) {
        const double l = steering::pure_pursuit_steer({0, 0, 0, 8, 0}, {7 * std::cos(al), 7 * std::sin(al)}, pp);
        const double r = steering::pure_pursuit_steer({0, 0, 0, 8, 0}, {7 * std::cos(-al), 7 * std::sin(-al)}, pp);
        if (l != -r) {
            o.require(false, "pure pursuit not odd-symmetric");
            break;
        }
    }

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0, 40), integ(-50, 50), gain(0, 2), dt(0.001, 0.1);
    int both = 0;
    for (int i = 0; i < 100000; ++i) {
        perception::PiState st;
        st.kp = gain(rng);
        st.ki = gain(rng);
        st.integrator = integ(rng);
        st.v_ref = v(rng);
        const auto p = perception::pi_speed_control(v(rng), st, dt(rng));
        if (p.throttle > 0 && p.brake > 0) ++both;
    }
    o.require(both == 0, fmt::format("{} states with both pedals", both));

    // v_ref step 8 -> 11.11 m/s through the vehicle model with one step of latency.
    const vehicle::VehicleParams vp;
    perception::PiState st;
    st.v_ref = 40 / 3.6;
    vehicle::VehicleState s{0, 0, 0, 8, 0};
    perception::Pedals held;
    double peak = 0, last_out = 0;
    for (int i = 0; i < 3000; ++i) {
        s = vehicle::integrate_step(s, {0, held.throttle, held.brake}, vp, 0.01);
        held = perception::pi_speed_control(s.speed, st, 0.01);
        peak = std::max(peak, s.speed);
        if (std::abs(s.speed - st.v_ref) > 0.02 * st.v_ref) last_out = (i + 1) * 0.01;
    }
    const double overshoot = (peak - st.v_ref) / (st.v_ref - 8);
    o.require(std::abs(s.speed - st.v_ref) <= 0.02 * st.v_ref && last_out < 30.0, "step response never settles in 2%");
    o.require(overshoot < 0.10, fmt::format("overshoot {:.1f}%", overshoot * 100));
    if (o.pass) o.detail = fmt::format("atan(0.5) err {:.1e}; 0/100000 both-pedal states; step settles in 2% after "
                                       "{:.2f} s, overshoot {:.1f}%",
                                       std::abs(delta - std::atan(0.5)), last_out, overshoot * 100);
    return o;
}

Outcome vehicle_oracles() {
    Outcome o;
    const vehicle::VehicleParams lossless{.drag = 0, .rolling = 0};
    const double R = lossless.wheelbase / std::tan(0.1);
    vehicle::VehicleState s{0, 0, 0, 10, 0};
    double worst = 0;
    const int steps = static_cast<int>(std::ceil(2 * std::numbers::pi * R / 0.01));
    for (int i = 0; i < steps; ++i) {
        s = vehicle::integrate_step(s, {0.1, 0, 0}, lossless, 0.001);
        worst = std::max(worst, std::abs(std::hypot(s.x, s.y - R) - R));
    }
    o.require(worst < 0.1, fmt::format("turning radius error {:.4f} m", worst));

    const vehicle::VehicleParams p;
    const double v_term = std::sqrt((0.3 * p.max_drive_force - p.rolling * p.mass * p.gravity) / p.drag);
    vehicle::VehicleState c{};
    for (int i = 0; i < 200000; ++i) c = vehicle::integrate_step(c, {0, 0.3, 0}, p, 0.01);
    const double rel = std::abs(c.speed - v_term) / v_term;
    o.require(rel < 0.01, fmt::format("terminal velocity error {:.3f}%", rel * 100));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.5, 1.5), st(-1, 1);
    vehicle::VehicleState f{0, 0, 0, 2, 0};
    int negative = 0;
    for (int i = 0; i < 100000; ++i) {
        f = vehicle::integrate_step(f, {st(rng), u(rng), u(rng)}, p, 0.01);
        if (f.speed < 0) ++negative;
    }
    o.require(negative == 0, fmt::format("{} negative speeds", negative));
    if (o.pass) o.detail = fmt::format("R={:.3f} m max dev {:.4f} m; v_term {:.3f} vs {:.3f} m/s ({:.3f}%); v>=0 "
                                       "over 100000 fuzz steps",
                                       R, worst, c.speed, v_term, rel * 100);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"1 end-to-end sign recognition (40 then 60 km/h)", sign_recognition},
        {"2 lane keeping on a curvy road", lane_keeping},
        {"3 determinism (repeat and multi-process)", determinism},
        {"4 perception codec grid", perception_codec},
        {"5 wire integrity", wire_integrity},
        {"6 barrier safety", barrier_safety},
        {"7 controller properties", controllers},
        {"8 vehicle model oracles", vehicle_oracles},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        failed += !o.pass;
        fmt::print("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
