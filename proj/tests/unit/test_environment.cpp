#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dtwin/environment/camera.hpp"
#include "dtwin/environment/environment_client.hpp"
#include "dtwin/environment/sign_glyph.hpp"
#include "dtwin/environment/track.hpp"
#include "dtwin/error.hpp"
#include "dtwin/wire/fragment.hpp"

using namespace dtwin;
using namespace dtwin::environment;

namespace {

Track straight(double length, std::vector<SpeedSign> signs = {}) {
    return Track({{0, 0}, {length, 0}}, 1.75, false, std::move(signs));
}

Track s_curve() {
    const std::vector<TrackPiece> pieces = {
        {TrackPiece::Kind::Straight, 20, 0, 0},
        {TrackPiece::Kind::Arc, 0, 30, std::numbers::pi / 2},
        {TrackPiece::Kind::Arc, 0, 25, -std::numbers::pi},
        {TrackPiece::Kind::Straight, 15, 0, 0},
    };
    return Track(build_centerline({0, 0, 0.2}, pieces, 0.5), 1.75);
}

std::size_t red_pixels(const wire::CameraFrame& f) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < f.pixels.size(); i += 3) n += glyph::is_red(f.pixels[i], f.pixels[i + 1], f.pixels[i + 2]);
    return n;
}

}  // namespace

TEST(Track, ProjectionBasics) {
    const Track t({{0, 0}, {10, 0}, {10, 10}}, 1.75);
    EXPECT_DOUBLE_EQ(t.length(), 20.0);
    const auto on = t.project({10, 0});
    EXPECT_DOUBLE_EQ(on.s, 10.0);
    EXPECT_DOUBLE_EQ(on.cte, 0.0);
    const auto left = t.project({4, 0.5});
    EXPECT_DOUBLE_EQ(left.s, 4.0);
    EXPECT_DOUBLE_EQ(left.cte, 0.5);
    EXPECT_DOUBLE_EQ(t.project({4, -0.5}).cte, -0.5);
}

TEST(Track, ClosedTrackWraps) {
    const Track t({{0, 0}, {10, 0}, {10, 10}, {0, 10}}, 1.75, true);
    EXPECT_DOUBLE_EQ(t.length(), 40.0);
    EXPECT_DOUBLE_EQ(t.normalize_s(45.0), 5.0);
    EXPECT_DOUBLE_EQ(t.distance_ahead(38.0, 2.0), 4.0);
    EXPECT_NEAR(t.project({0, 5}).s, 35.0, 1e-12);
}

TEST(Track, ProjectionInvertsParameterization) {
    const Track t = s_curve();
    for (double s = 0; s < t.length(); s += 0.37) {
        const auto p = t.project(t.point_at(s));
        EXPECT_NEAR(p.s, s, 1e-9);
        EXPECT_NEAR(p.cte, 0.0, 1e-9);
    }
}

TEST(Track, ProjectionAgreesWithBruteForce) {
    const Track t = s_curve();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> along(0, t.length()), off(-1.0, 1.0);
    for (int q = 0; q < 40; ++q) {
        const double s0 = along(rng);
        const Point2 c = t.point_at(s0);
        const double h = t.heading_at(s0);
        const double o = off(rng);
        const Point2 p{c.x - o * std::sin(h), c.y + o * std::cos(h)};

        double best = 1e300, s_brute = 0;
        for (double s = 0; s <= t.length(); s += 0.001) {
            const Point2 a = t.point_at(s);
            const double d2 = (a.x - p.x) * (a.x - p.x) + (a.y - p.y) * (a.y - p.y);
            if (d2 < best) {
                best = d2;
                s_brute = s;
            }
        }
        const auto fast = t.project(p);
        EXPECT_LT(std::abs(fast.s - s_brute), 0.005) << "query " << q;
        EXPECT_NEAR(std::abs(fast.cte), std::sqrt(best), 1e-3);
        const auto near = t.project_near(p, s0, 10, 20);
        EXPECT_NEAR(near.s, fast.s, 1e-9);
    }
}

TEST(Track, BuildCenterlineEndsOnAnalyticPoint) {
    const std::vector<TrackPiece> quarter = {{TrackPiece::Kind::Arc, 0, 30, std::numbers::pi / 2}};
    const auto pts = build_centerline({0, 0, 0}, quarter, 0.5);
    EXPECT_NEAR(pts.back().x, 30.0, 1e-9);
    EXPECT_NEAR(pts.back().y, 30.0, 1e-9);
    for (const auto& p : pts) EXPECT_NEAR(std::hypot(p.x, p.y - 30), 30.0, 1e-9);
}

TEST(Track, Validation) {
    EXPECT_THROW(Track({{0, 0}}, 1.75), Error);
    EXPECT_THROW(Track({{0, 0}, {0, 0}}, 1.75), Error);
    EXPECT_THROW(Track({{0, 0}, {10, 0}}, 0.0), Error);
    EXPECT_THROW(straight(50, {{60, 40}}), Error);
    EXPECT_THROW(straight(50, {{20, 45}}), Error);
    EXPECT_NO_THROW(straight(50, {{20, 80}}));
}

TEST(Camera, GlyphRadius) {
    EXPECT_EQ(glyph_radius(16), 20);
    EXPECT_EQ(glyph_radius(5), 20);
    EXPECT_EQ(glyph_radius(40), 8);
    EXPECT_EQ(glyph_radius(100), 4);
}

TEST(Camera, NoSignInRangeMeansNoRed) {
    const Track t = straight(200, {{60, 40}});
    const CameraParams cam;
    const vehicle::VehicleState ego{0, 0, 0, 8, 0};
    EXPECT_FALSE(visible_sign(ego, 0, t, cam));
    EXPECT_EQ(red_pixels(render_camera(ego, t, cam)), 0u);
    const vehicle::VehicleState past{70, 0, 0, 8, 0};
    EXPECT_EQ(red_pixels(render_camera(past, t, cam)), 0u);
}

TEST(Camera, SignAt16mIsCentredRadius20) {
    const Track t = straight(200, {{16, 40}});
    const CameraParams cam;
    const vehicle::VehicleState ego{0, 0, 0, 8, 0};
    const auto vs = visible_sign(ego, 0, t, cam);
    ASSERT_TRUE(vs);
    EXPECT_EQ(vs->radius_px, 20);
    EXPECT_DOUBLE_EQ(vs->cx, 32.0);
    EXPECT_DOUBLE_EQ(vs->cy, 24.0);

    const auto f = render_camera(ego, t, cam);
    int min_u = 1 << 20, max_u = -1;
    for (int v = 0; v < f.height; ++v) {
        for (int u = 0; u < f.width; ++u) {
            const auto* px = &f.pixels[(static_cast<std::size_t>(v) * f.width + u) * 3];
            if (glyph::is_red(px[0], px[1], px[2])) {
                min_u = std::min(min_u, u);
                max_u = std::max(max_u, u);
            }
        }
    }
    EXPECT_EQ(min_u, 12);
    EXPECT_EQ(max_u, 51);
    // Ring area pi (r^2 - (0.75 r)^2), clipped by nothing at this size.
    const double ring = std::numbers::pi * (400.0 - 225.0);
    EXPECT_NEAR(static_cast<double>(red_pixels(f)), ring, 0.05 * ring);
}

TEST(Camera, SignOutsideFieldOfViewHidden) {
    // Sign 10 m ahead, ego rotated 60 degrees away from the road.
    const Track t = straight(200, {{10, 40}});
    const vehicle::VehicleState ego{0, 0, std::numbers::pi / 3, 8, 0};
    EXPECT_FALSE(visible_sign(ego, 0, t, CameraParams{}));
}

TEST(Camera, RenderIsDeterministicAndShowsRoad) {
    const Track t = s_curve();
    const vehicle::VehicleState ego{t.point_at(10).x, t.point_at(10).y, t.heading_at(10), 8, 0};
    const auto a = render_camera(ego, t, CameraParams{});
    const auto b = render_camera(ego, t, CameraParams{});
    EXPECT_EQ(a, b);
    ASSERT_TRUE(a.well_formed());
    // Bottom-centre pixel looks at the road just ahead.
    const auto* px = &a.pixels[((47 * 64) + 32) * 3];
    EXPECT_EQ(px[0], 110);
    EXPECT_EQ(px[1], 110);
}

TEST(EnvironmentClient, FirstFrameFromInitialPoseInSevenFragments) {
    const Track t = straight(200, {{16, 60}});
    const vehicle::VehicleState init{0, 0, 0, 8, 0};
    const auto perception = wire::MacAddress::local(4);
    EnvironmentClient env(t, CameraParams{}, init, perception);
    const auto out = env(gateway::Inbox{0, {}});
    ASSERT_EQ(out.size(), 7u);
    std::vector<wire::CameraFragment> frags;
    for (const auto& o : out) {
        EXPECT_EQ(o.dst, perception);
        frags.push_back(std::get<wire::CameraFragment>(o.payload));
    }
    EXPECT_EQ(wire::reassemble(frags), render_camera(init, t, CameraParams{}));
}

TEST(EnvironmentClient, FollowsTelemetry) {
    const Track t = straight(200);
    EnvironmentClient env(t, CameraParams{}, {0, 0, 0, 0, 0}, wire::MacAddress::local(4));
    const wire::VehicleTelemetry tel{50, 0.5f, 0.05f, 8, 0};
    env(gateway::Inbox{3, {{wire::MacAddress::local(1), tel}}});
    EXPECT_DOUBLE_EQ(env.pose().x, 50.0);
    EXPECT_DOUBLE_EQ(env.pose().y, 0.5);
}

TEST(EnvironmentClient, NoiseIsSeeded) {
    wire::CameraFrame f{8, 8, std::vector<std::uint8_t>(8 * 8 * 3, 128)};
    auto a = f, b = f;
    std::mt19937_64 r1(5), r2(5);
    apply_pixel_noise(a, 10, r1);
    apply_pixel_noise(b, 10, r2);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, f);
    for (auto p : a.pixels) EXPECT_LE(std::abs(int(p) - 128), 10);
}
