#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace labseq {

inline constexpr std::size_t kJointCount = 6;

/// One arm configuration: six joint angles in radians.
struct JointConfig {
    std::array<double, kJointCount> q{};

    bool operator==(const JointConfig&) const = default;
};

/// Per-joint speed caps in rad/s. Every entry must be positive and finite.
struct VelocityLimits {
    std::array<double, kJointCount> v{};

    bool operator==(const VelocityLimits&) const = default;

    static VelocityLimits uniform(double speed);
};

/// Per-joint position bounds in radians.
struct JointLimits {
    std::array<double, kJointCount> lower{};
    std::array<double, kJointCount> upper{};

    bool operator==(const JointLimits&) const = default;

    /// [-bound, bound] on every joint.
    static JointLimits symmetric(double bound);
};

/// Unit quaternion, scalar first.
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Quaternion&) const = default;

    double norm() const;
    std::array<double, 3> rotate(const std::array<double, 3>& v) const;

    /// axis need not be normalized; angle in radians.
    static Quaternion from_axis_angle(const std::array<double, 3>& axis, double angle_rad);
};

/// End-effector pose: position in millimeters plus a unit orientation.
struct CartesianPose {
    std::array<double, 3> position_mm{};
    Quaternion orientation;

    bool operator==(const CartesianPose&) const = default;
};

void validate(const VelocityLimits& limits);
void validate(const JointLimits& limits);
void validate(const JointConfig& config, const JointLimits& limits);

/// Duration of a time-optimal synchronized point-to-point move: all joints
/// start and stop together, so the move takes as long as the slowest joint,
/// max_j |a_j - b_j| / v_j. This is the edge weight used by the sequencer.
double motion_duration(const JointConfig& a, const JointConfig& b, const VelocityLimits& limits);

/// Angle in degrees between the pose's up axis (body +Z) and world +Z.
/// 0 = perfectly upright, 180 = upside down.
double tilt_from_vertical(const CartesianPose& pose);

/// n >= 2 waypoints, linear in joint space. First equals a and last equals b
/// exactly.
std::vector<JointConfig> interpolate(const JointConfig& a, const JointConfig& b, std::size_t n);

namespace detail {
// No validation; callers guarantee finite inputs and positive limits.
double motion_duration_unchecked(const JointConfig& a, const JointConfig& b,
                                 const VelocityLimits& limits);
}  // namespace detail

}  // namespace labseq
