#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "labseq/kinematics.hpp"

namespace labseq {

/// One Cartesian target and the joint configurations that can reach it.
struct TargetLayer {
    std::string label;
    std::vector<JointConfig> candidates;

    bool operator==(const TargetLayer&) const = default;
};

/// An ordered group of targets that belong to one task.
struct TaskSpec {
    std::string name;
    std::vector<TargetLayer> layers;

    bool operator==(const TaskSpec&) const = default;
};

/// Returns true when the direct move between two configurations is allowed.
/// An empty function means every edge is allowed.
using EdgeFeasibility = std::function<bool(const JointConfig&, const JointConfig&)>;

/// A sequencing problem: visit every target of every task, in order, choosing
/// one configuration per target so that total motion time is minimal.
struct SequenceInstance {
    JointConfig home;
    std::vector<TaskSpec> tasks;
    VelocityLimits limits = VelocityLimits::uniform(1.0);
    EdgeFeasibility feasibility;
};

enum class Method {
    kMethod1PerTask = 1,  // solve each task separately, chain the results
    kMethod2Global = 2,   // concatenate all targets, solve once
    kBruteForce = 3,      // exhaustive oracle
};

const char* to_string(Method method);

struct SequencePlan {
    /// One candidate index per target, in global layer order.
    std::vector<std::size_t> chosen;
    /// Motion time of the full path home -> first target -> ... -> last.
    double total_duration_s = 0.0;
    /// Wall-clock time spent solving; informational only.
    double planning_time_s = 0.0;
    Method method = Method::kMethod2Global;
};

/// Counts motion-cost evaluations performed by a solver.
struct SolveStats {
    std::size_t edge_evaluations = 0;
};

std::size_t layer_count(const SequenceInstance& inst);

/// Product of candidate counts over all layers, saturating at 2^64-1.
std::uint64_t assignment_count(const SequenceInstance& inst);

/// Motion time of the path selected by `chosen`, summed from home forward.
double path_duration(const SequenceInstance& inst, const std::vector<std::size_t>& chosen);

/// Exact minimum-duration assignment via per-layer dynamic programming over
/// the layered graph. Ties resolve to the lexicographically smallest index
/// vector. Throws InfeasibleError naming the first unreachable layer.
SequencePlan solve_global(const SequenceInstance& inst, SolveStats* stats = nullptr);

/// Solves each task's layers separately: task 1 starts from home, each later
/// task starts from the configuration chosen for the previous task's final
/// target. The reported duration covers the full concatenated path.
SequencePlan solve_per_task(const SequenceInstance& inst, SolveStats* stats = nullptr);

/// Exhaustive enumeration of every assignment in lexicographic order; keeps
/// the first minimum found, so ties match solve_global. Refuses instances
/// with more than 100000 assignments.
SequencePlan brute_force(const SequenceInstance& inst);

struct MethodComparison {
    SequencePlan method1;
    SequencePlan method2;
    /// True when method 2's duration is no worse than method 1's
    /// (allowing 1e-9 of floating-point slack).
    bool method2_no_worse = false;
};

MethodComparison compare_methods(const SequenceInstance& inst);

}  // namespace labseq
