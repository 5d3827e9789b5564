#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "labseq/kinematics.hpp"

using namespace labseq;
using labseq::testing::jc;
using labseq::testing::jc1;
using labseq::testing::random_config;

TEST_SUITE_BEGIN("kinematics");

TEST_CASE("motion_duration basics") {
    const auto limits = VelocityLimits::uniform(1.0);

    SUBCASE("identical configurations take no time") {
        const auto a = jc({0.3, -1.2, 0.5, 2.0, -0.7, 1.1});
        CHECK(motion_duration(a, a, limits) == 0.0);
    }
    SUBCASE("single active joint") {
        CHECK(motion_duration(jc1(0.0), jc1(0.5), limits) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("the slowest joint dominates") {
        // dq = (0.2, 0.6, 0, 0, 0, 0) with v = (1, 2, 1, 1, 1, 1):
        // per-joint times are 0.2 and 0.3, so the move takes 0.3 s.
        VelocityLimits limits2;
        limits2.v = {1.0, 2.0, 1.0, 1.0, 1.0, 1.0};
        const auto a = jc({0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
        const auto b = jc({0.2, 0.6, 0.0, 0.0, 0.0, 0.0});
        CHECK(motion_duration(a, b, limits2) == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("invalid limits are rejected") {
        VelocityLimits bad = limits;
        bad.v[3] = 0.0;
        CHECK_THROWS_AS(motion_duration(jc1(0.0), jc1(1.0), bad), std::invalid_argument);
        bad.v[3] = -1.0;
        CHECK_THROWS_AS(motion_duration(jc1(0.0), jc1(1.0), bad), std::invalid_argument);
    }
    SUBCASE("non-finite configurations are rejected") {
        auto a = jc1(0.0);
        a.q[2] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(motion_duration(a, jc1(1.0), limits), std::invalid_argument);
    }
}

TEST_CASE("motion_duration is a metric") {
    std::mt19937_64 rng(7001);
    VelocityLimits limits;
    limits.v = {1.0, 0.5, 2.0, 1.5, 0.8, 1.2};

    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_config(rng);
        const auto b = random_config(rng);
        const auto c = random_config(rng);
        const double ab = motion_duration(a, b, limits);
        const double ba = motion_duration(b, a, limits);
        const double ac = motion_duration(a, c, limits);
        const double cb = motion_duration(c, b, limits);

        CHECK(ab >= 0.0);
        CHECK(ab == ba);
        CHECK(ab <= ac + cb + 1e-12);
        if (!(a == b)) {
            CHECK(ab > 0.0);
        }
    }
}

TEST_CASE("scaling velocity limits scales durations and keeps argmins") {
    std::mt19937_64 rng(7002);
    VelocityLimits limits;
    limits.v = {1.0, 0.5, 2.0, 1.5, 0.8, 1.2};
    VelocityLimits scaled;
    const double c = 3.0;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        scaled.v[j] = limits.v[j] * c;
    }

    for (int trial = 0; trial < 50; ++trial) {
        const auto from = random_config(rng);
        std::vector<JointConfig> candidates;
        for (int i = 0; i < 6; ++i) {
            candidates.push_back(random_config(rng));
        }
        std::size_t argmin_base = 0;
        std::size_t argmin_scaled = 0;
        double best_base = std::numeric_limits<double>::infinity();
        double best_scaled = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const double base = motion_duration(from, candidates[i], limits);
            const double fast = motion_duration(from, candidates[i], scaled);
            CHECK(fast == doctest::Approx(base / c).epsilon(1e-12));
            if (base < best_base) {
                best_base = base;
                argmin_base = i;
            }
            if (fast < best_scaled) {
                best_scaled = fast;
                argmin_scaled = i;
            }
        }
        CHECK(argmin_base == argmin_scaled);
    }
}

TEST_CASE("tilt_from_vertical") {
    SUBCASE("identity orientation is upright") {
        CHECK(tilt_from_vertical(CartesianPose{}) == 0.0);
    }
    SUBCASE("half turn about X is upside down") {
        CartesianPose pose;
        pose.orientation = Quaternion{0.0, 1.0, 0.0, 0.0};
        CHECK(tilt_from_vertical(pose) == doctest::Approx(180.0).epsilon(1e-12));
    }
    SUBCASE("quarter turn about Y lies sideways") {
        CartesianPose pose;
        pose.orientation = Quaternion::from_axis_angle({0.0, 1.0, 0.0}, std::numbers::pi / 2.0);
        CHECK(tilt_from_vertical(pose) == doctest::Approx(90.0).epsilon(1e-9));
    }
    SUBCASE("any orientation lands in [0, 180]") {
        std::mt19937_64 rng(7003);
        std::normal_distribution<double> n(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            Quaternion q{n(rng), n(rng), n(rng), n(rng)};
            const double norm = q.norm();
            if (norm < 1e-6) continue;
            q.w /= norm;
            q.x /= norm;
            q.y /= norm;
            q.z /= norm;
            CartesianPose pose;
            pose.orientation = q;
            const double tilt = tilt_from_vertical(pose);
            CHECK(tilt >= 0.0);
            CHECK(tilt <= 180.0);
        }
    }
    SUBCASE("non-unit quaternions are rejected") {
        CartesianPose pose;
        pose.orientation = Quaternion{0.9, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(tilt_from_vertical(pose), std::invalid_argument);
    }
}

TEST_CASE("interpolate") {
    SUBCASE("two waypoints between equal endpoints") {
        const auto a = jc1(0.4);
        const auto waypoints = interpolate(a, a, 2);
        REQUIRE(waypoints.size() == 2);
        CHECK(waypoints[0] == a);
        CHECK(waypoints[1] == a);
    }
    SUBCASE("midpoint of a unit step") {
        const auto a = jc({0, 0, 0, 0, 0, 0});
        const auto b = jc({1, 1, 1, 1, 1, 1});
        const auto waypoints = interpolate(a, b, 3);
        REQUIRE(waypoints.size() == 3);
        for (double qj : waypoints[1].q) {
            CHECK(qj == 0.5);
        }
    }
    SUBCASE("five waypoints follow a + k/4 (b - a)") {
        const auto a = jc({0.1, -0.2, 0.3, 0.0, 1.0, -1.0});
        const auto b = jc({1.1, 0.6, -0.5, 2.0, 0.0, 1.0});
        const auto waypoints = interpolate(a, b, 5);
        REQUIRE(waypoints.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            for (std::size_t j = 0; j < kJointCount; ++j) {
                const double expected = a.q[j] + (static_cast<double>(k) / 4.0) * (b.q[j] - a.q[j]);
                CHECK(waypoints[k].q[j] == doctest::Approx(expected).epsilon(1e-12));
            }
        }
        CHECK(waypoints.front() == a);
        CHECK(waypoints.back() == b);
    }
    SUBCASE("fewer than two waypoints is an error") {
        CHECK_THROWS_AS(interpolate(jc1(0), jc1(1), 1), std::invalid_argument);
        CHECK_THROWS_AS(interpolate(jc1(0), jc1(1), 0), std::invalid_argument);
    }
}

TEST_CASE("joint limit validation") {
    const auto limits = JointLimits::symmetric(3.14);
    CHECK_NOTHROW(validate(jc1(3.0), limits));
    CHECK_THROWS_AS(validate(jc1(3.5), limits), std::invalid_argument);
    JointLimits inverted = limits;
    inverted.lower[0] = 1.0;
    inverted.upper[0] = -1.0;
    CHECK_THROWS_AS(validate(inverted), std::invalid_argument);
}

TEST_SUITE_END();
