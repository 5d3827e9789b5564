#include "labseq/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace labseq {

namespace {

bool all_finite(const std::array<double, kJointCount>& a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

VelocityLimits VelocityLimits::uniform(double speed) {
    VelocityLimits limits;
    limits.v.fill(speed);
    return limits;
}

JointLimits JointLimits::symmetric(double bound) {
    JointLimits limits;
    limits.lower.fill(-bound);
    limits.upper.fill(bound);
    return limits;
}

double Quaternion::norm() const {
    return std::sqrt(w * w + x * x + y * y + z * z);
}

std::array<double, 3> Quaternion::rotate(const std::array<double, 3>& v) const {
    // v' = v + 2w(u x v) + 2(u x (u x v)), u = vector part
    const double ux = y * v[2] - z * v[1];
    const double uy = z * v[0] - x * v[2];
    const double uz = x * v[1] - y * v[0];
    const double uux = y * uz - z * uy;
    const double uuy = z * ux - x * uz;
    const double uuz = x * uy - y * ux;
    return {v[0] + 2.0 * (w * ux + uux),
            v[1] + 2.0 * (w * uy + uuy),
            v[2] + 2.0 * (w * uz + uuz)};
}

Quaternion Quaternion::from_axis_angle(const std::array<double, 3>& axis, double angle_rad) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n <= 0.0 || !std::isfinite(n)) {
        throw std::invalid_argument("rotation axis must be a nonzero finite vector");
    }
    const double half = 0.5 * angle_rad;
    const double s = std::sin(half) / n;
    return Quaternion{std::cos(half), axis[0] * s, axis[1] * s, axis[2] * s};
}

void validate(const VelocityLimits& limits) {
    for (double vj : limits.v) {
        if (!std::isfinite(vj) || vj <= 0.0) {
            throw std::invalid_argument("velocity limits must be positive and finite");
        }
    }
}

void validate(const JointLimits& limits) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
        if (!std::isfinite(limits.lower[j]) || !std::isfinite(limits.upper[j]) ||
            limits.lower[j] > limits.upper[j]) {
            throw std::invalid_argument("joint limits must be finite with lower <= upper");
        }
    }
}

void validate(const JointConfig& config, const JointLimits& limits) {
    if (!all_finite(config.q)) {
        throw std::invalid_argument("joint configuration must be finite");
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
        if (config.q[j] < limits.lower[j] || config.q[j] > limits.upper[j]) {
            throw std::invalid_argument("joint " + std::to_string(j + 1) +
                                        " out of limits: " + std::to_string(config.q[j]));
        }
    }
}

double motion_duration(const JointConfig& a, const JointConfig& b, const VelocityLimits& limits) {
    if (!all_finite(a.q) || !all_finite(b.q)) {
        throw std::invalid_argument("joint configurations must be finite");
    }
    validate(limits);
    return detail::motion_duration_unchecked(a, b, limits);
}

double tilt_from_vertical(const CartesianPose& pose) {
    const Quaternion& q = pose.orientation;
    if (std::abs(q.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("pose orientation must be a unit quaternion");
    }
    const auto up = q.rotate({0.0, 0.0, 1.0});
    const double c = std::clamp(up[2], -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

std::vector<JointConfig> interpolate(const JointConfig& a, const JointConfig& b, std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("interpolation needs at least 2 waypoints");
    }
    std::vector<JointConfig> waypoints(n);
    waypoints.front() = a;
    waypoints.back() = b;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            waypoints[k].q[j] = a.q[j] + t * (b.q[j] - a.q[j]);
        }
    }
    return waypoints;
}

namespace detail {

double motion_duration_unchecked(const JointConfig& a, const JointConfig& b,
                                 const VelocityLimits& limits) {
    double worst = 0.0;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        worst = std::max(worst, std::abs(a.q[j] - b.q[j]) / limits.v[j]);
    }
    return worst;
}

}  // namespace detail

}  // namespace labseq
