#pragma once

#include <cstddef>
#include <random>

#include "labseq/sequencer.hpp"

namespace labseq {

/// Shape bounds for randomly generated sequencing instances.
struct InstanceGenOptions {
    std::size_t min_tasks = 1;
    std::size_t max_tasks = 3;
    std::size_t min_layers_per_task = 1;
    std::size_t max_layers_per_task = 3;
    std::size_t min_candidates = 1;
    std::size_t max_candidates = 4;
    /// Hard cap on total layers across tasks (keeps brute force tractable).
    std::size_t max_total_layers = 8;
    /// Joint angles drawn uniformly from [-joint_range, joint_range].
    double joint_range = 2.5;
};

/// Seeded random instance for solver sweeps. Deterministic for a given
/// engine state and options.
SequenceInstance random_instance(std::mt19937_64& rng, const InstanceGenOptions& options = {});

}  // namespace labseq
