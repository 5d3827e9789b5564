#pragma once

#include <random>
#include <string>

#include "labseq/kinematics.hpp"
#include "labseq/sequencer.hpp"

namespace labseq::testing {

/// Configuration moving only joint 1; the rest at zero.
inline JointConfig jc1(double q1) {
    JointConfig c;
    c.q = {q1, 0.0, 0.0, 0.0, 0.0, 0.0};
    return c;
}

inline JointConfig jc(const std::array<double, kJointCount>& q) {
    JointConfig c;
    c.q = q;
    return c;
}

inline JointConfig random_config(std::mt19937_64& rng, double range = 2.5) {
    std::uniform_real_distribution<double> angle(-range, range);
    JointConfig c;
    for (double& qj : c.q) {
        qj = angle(rng);
    }
    return c;
}

inline std::string data_path(const std::string& name) {
    return std::string(LABSEQ_DATA_DIR) + "/" + name;
}

}  // namespace labseq::testing
