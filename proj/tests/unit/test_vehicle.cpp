#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dtwin/error.hpp"
#include "dtwin/vehicle/vehicle_client.hpp"
#include "dtwin/vehicle/vehicle_model.hpp"

using namespace dtwin;
using namespace dtwin::vehicle;

TEST(Vehicle, LongitudinalExamples) {
    const VehicleParams p;
    EXPECT_DOUBLE_EQ(longitudinal_accel(0, 0, 1, p), 0.0);
    EXPECT_DOUBLE_EQ(longitudinal_accel(0, 1, 0, p), 4.0);
    // -(0.38 * 20^2 + 0.012 * 1000 * 9.81) / 1000
    EXPECT_NEAR(longitudinal_accel(20, 0, 0, p), -0.26972, 1e-12);
    EXPECT_DOUBLE_EQ(longitudinal_accel(0, 2.0, -1.0, p), 4.0);
}

TEST(Vehicle, StraightLineStep) {
    const VehicleParams p{.drag = 0, .rolling = 0};
    const VehicleState s0{0, 0, 0, 10, 0};
    const auto s1 = integrate_step(s0, {}, p, 0.01);
    EXPECT_DOUBLE_EQ(s1.x, 0.1);
    EXPECT_EQ(s1.y, 0.0);
    EXPECT_EQ(s1.heading, 0.0);
}

TEST(Vehicle, MirroredSteering) {
    const VehicleParams p;
    VehicleState a{0, 0, 0, 10, 0}, b = a;
    for (int i = 0; i < 500; ++i) {
        a = integrate_step(a, {0.2, 0.3, 0}, p, 0.01);
        b = integrate_step(b, {-0.2, 0.3, 0}, p, 0.01);
        ASSERT_EQ(a.y, -b.y);
        ASSERT_EQ(a.x, b.x);
        ASSERT_EQ(a.heading, -b.heading);
    }
}

TEST(Vehicle, SteeringIsClampedToMax) {
    const VehicleParams p;
    const VehicleState s{0, 0, 0, 5, 0};
    EXPECT_EQ(integrate_step(s, {3.0, 0, 0}, p, 0.01), integrate_step(s, {0.5, 0, 0}, p, 0.01));
}

TEST(Vehicle, TurningCircleMatchesClosedForm) {
    // Forces balanced: no resistance terms, no pedal, so v stays at 10.
    const VehicleParams p{.drag = 0, .rolling = 0};
    const double delta = 0.1;
    const double R = p.wheelbase / std::tan(delta);  // 24.9166 m
    ASSERT_NEAR(R, 24.91661, 1e-5);
    const double dt = 0.001;
    VehicleState s{0, 0, 0, 10, 0};
    // Centre of the circle sits R to the left of the start pose.
    const double cx = 0, cy = R;
    const int steps = static_cast<int>(std::ceil(2 * std::numbers::pi * R / (10 * dt)));
    double worst = 0;
    for (int i = 0; i < steps; ++i) {
        s = integrate_step(s, {delta, 0, 0}, p, dt);
        worst = std::max(worst, std::abs(std::hypot(s.x - cx, s.y - cy) - R));
    }
    EXPECT_DOUBLE_EQ(s.speed, 10.0);
    EXPECT_LT(worst, 0.1);
}

TEST(Vehicle, TerminalVelocityMatchesQuadraticRoot) {
    const VehicleParams p;
    // 0.3 F = c_d v^2 + C_rr m g  ->  v = sqrt((0.3 F - C_rr m g) / c_d)
    const double v_oracle = std::sqrt((0.3 * p.max_drive_force - p.rolling * p.mass * p.gravity) / p.drag);
    ASSERT_NEAR(v_oracle, 53.37, 0.01);
    VehicleState s{};
    for (int i = 0; i < 200000; ++i) s = integrate_step(s, {0, 0.3, 0}, p, 0.01);
    EXPECT_LT(std::abs(s.speed - v_oracle) / v_oracle, 0.01);
}

TEST(Vehicle, SpeedNeverNegativeUnderFuzz) {
    const VehicleParams p;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.5, 1.5), steer(-1, 1);
    VehicleState s{0, 0, 0, 3, 0};
    for (int i = 0; i < 100000; ++i) {
        s = integrate_step(s, {steer(rng), u(rng), u(rng)}, p, 0.01);
        ASSERT_GE(s.speed, 0.0) << "step " << i;
        ASSERT_GT(s.heading, -std::numbers::pi - 1e-12);
        ASSERT_LE(s.heading, std::numbers::pi + 1e-12);
    }
}

TEST(Vehicle, ParamsValidation) {
    VehicleParams p;
    EXPECT_NO_THROW(p.validate());
    p.mass = 0;
    p.wheelbase = -1;
    try {
        p.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
        EXPECT_NE(std::string(e.what()).find("mass"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("wheelbase"), std::string::npos);
    }
}

TEST(VehicleClient, EmptyInboxPublishesOneStepOfInitialState) {
    const VehicleParams p;
    const VehicleState init{1, 2, 0.3, 5, 0};
    VehicleClient c(p, init, 0.01);
    const auto out = c(gateway::Inbox{0, {}});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].dst.is_broadcast());
    const auto t = std::get<wire::VehicleTelemetry>(out[0].payload);
    EXPECT_EQ(t, to_telemetry(integrate_step(init, {}, p, 0.01)));
}

TEST(VehicleClient, LastCommandWinsAndIsHeld) {
    const VehicleParams p;
    VehicleClient c(p, {0, 0, 0, 5, 0}, 0.01);
    const auto src = wire::MacAddress::local(3);
    c(gateway::Inbox{0, {{src, wire::SteeringCommand{0.1f}}, {src, wire::SteeringCommand{-0.2f}},
                         {src, wire::SpeedCommand{0.4f, 0}}}});
    EXPECT_FLOAT_EQ(static_cast<float>(c.command().steering), -0.2f);
    EXPECT_FLOAT_EQ(static_cast<float>(c.command().throttle), 0.4f);
    c(gateway::Inbox{1, {}});
    EXPECT_FLOAT_EQ(static_cast<float>(c.command().steering), -0.2f);
    EXPECT_FLOAT_EQ(static_cast<float>(c.command().throttle), 0.4f);
}
