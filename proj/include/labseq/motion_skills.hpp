#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "labseq/kinematics.hpp"

namespace labseq {

/// A pouring motion: total end-effector twist and translation toward the
/// receiving vessel, applied as a sequence of small increments.
struct TwistProfile {
    double total_angle_deg = 0.0;
    double total_dx_mm = 0.0;
    double max_angle_increment_deg = 12.2;
    bool stir_bar = false;

    bool operator==(const TwistProfile&) const = default;
};

void validate(const TwistProfile& profile);

struct PourWaypoint {
    double angle_deg = 0.0;  // cumulative twist
    double dx_mm = 0.0;      // cumulative translation

    bool operator==(const PourWaypoint&) const = default;
};

/// Cumulative (angle, dx) waypoints for a gradual pour. The translation
/// advances proportionally to the twist, every increment stays within
/// max_angle_increment_deg, and the final waypoint equals the profile totals
/// exactly. Zero totals yield an empty list.
std::vector<PourWaypoint> generate_pour_waypoints(const TwistProfile& profile);

/// Same totals, half the angle increment: the more gradual schedule used
/// when the vial contains a stir bar that obstructs the flow.
TwistProfile stir_bar_profile(const TwistProfile& base);

/// Keep-upright requirement for transporting uncapped vials.
struct UprightConstraint {
    double max_tilt_deg = 15.0;

    bool operator==(const UprightConstraint&) const = default;
};

void validate(const UprightConstraint& constraint);

struct UprightViolation {
    std::size_t index = 0;
    double tilt_deg = 0.0;
};

/// Checks every waypoint's tilt against the constraint (closed bound:
/// a tilt exactly at max_tilt_deg is accepted). Returns the first violation,
/// or nullopt when the whole trajectory is acceptable.
std::optional<UprightViolation> validate_upright(const std::vector<CartesianPose>& trajectory,
                                                 const UprightConstraint& constraint);

}  // namespace labseq
