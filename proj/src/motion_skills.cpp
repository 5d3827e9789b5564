#include "labseq/motion_skills.hpp"

#include <cmath>
#include <stdexcept>

namespace labseq {

void validate(const TwistProfile& profile) {
    if (!(profile.total_angle_deg >= 0.0) || !std::isfinite(profile.total_angle_deg)) {
        throw std::invalid_argument("total twist angle must be non-negative");
    }
    if (!(profile.total_dx_mm >= 0.0) || !std::isfinite(profile.total_dx_mm)) {
        throw std::invalid_argument("total translation must be non-negative");
    }
    if (!(profile.max_angle_increment_deg > 0.0) || !std::isfinite(profile.max_angle_increment_deg)) {
        throw std::invalid_argument("angle increment must be positive");
    }
}

std::vector<PourWaypoint> generate_pour_waypoints(const TwistProfile& profile) {
    validate(profile);

    // ceil with a small guard so exact multiples (e.g. 122 / 12.2) don't pick
    // up a spurious extra step from floating-point division.
    std::size_t steps = static_cast<std::size_t>(
        std::ceil(profile.total_angle_deg / profile.max_angle_increment_deg - 1e-9));
    if (steps == 0 && profile.total_dx_mm > 0.0) {
        steps = 1;  // pure translation still needs one waypoint to land on the total
    }

    std::vector<PourWaypoint> waypoints;
    waypoints.reserve(steps);
    for (std::size_t k = 1; k <= steps; ++k) {
        PourWaypoint wp;
        if (k == steps) {
            wp.angle_deg = profile.total_angle_deg;
            wp.dx_mm = profile.total_dx_mm;
        } else {
            const double t = static_cast<double>(k) / static_cast<double>(steps);
            wp.angle_deg = profile.total_angle_deg * t;
            wp.dx_mm = profile.total_dx_mm * t;
        }
        waypoints.push_back(wp);
    }
    return waypoints;
}

TwistProfile stir_bar_profile(const TwistProfile& base) {
    validate(base);
    TwistProfile gradual = base;
    gradual.stir_bar = true;
    gradual.max_angle_increment_deg = base.max_angle_increment_deg / 2.0;
    return gradual;
}

void validate(const UprightConstraint& constraint) {
    if (!(constraint.max_tilt_deg >= 0.0) || !(constraint.max_tilt_deg <= 180.0)) {
        throw std::invalid_argument("max tilt must lie in [0, 180] degrees");
    }
}

std::optional<UprightViolation> validate_upright(const std::vector<CartesianPose>& trajectory,
                                                 const UprightConstraint& constraint) {
    validate(constraint);
    if (trajectory.empty()) {
        throw std::invalid_argument("trajectory must contain at least one pose");
    }
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const double tilt = tilt_from_vertical(trajectory[i]);
        if (tilt > constraint.max_tilt_deg) {
            return UprightViolation{i, tilt};
        }
    }
    return std::nullopt;
}

}  // namespace labseq
