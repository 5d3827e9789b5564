#include "labseq/sequencer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "labseq/errors.hpp"

namespace labseq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point start) {
    return std::chrono::duration<double>(SteadyClock::now() - start).count();
}

struct FlatLayer {
    const TargetLayer* layer;
    std::size_t task_index;
};

void validate_instance(const SequenceInstance& inst) {
    validate(inst.limits);
    if (inst.tasks.empty()) {
        throw std::invalid_argument("instance has no tasks");
    }
    for (const TaskSpec& task : inst.tasks) {
        if (task.layers.empty()) {
            throw std::invalid_argument("task '" + task.name + "' has no targets");
        }
        for (const TargetLayer& layer : task.layers) {
            if (layer.candidates.empty()) {
                throw std::invalid_argument("target '" + layer.label + "' of task '" + task.name +
                                            "' has no configuration candidates");
            }
        }
    }
}

std::vector<FlatLayer> flatten(const SequenceInstance& inst) {
    std::vector<FlatLayer> flat;
    for (std::size_t t = 0; t < inst.tasks.size(); ++t) {
        for (const TargetLayer& layer : inst.tasks[t].layers) {
            flat.push_back({&layer, t});
        }
    }
    return flat;
}

[[noreturn]] void throw_blocked(const SequenceInstance& inst, const FlatLayer& flat,
                                std::size_t index) {
    throw InfeasibleError("layer " + std::to_string(index) + " (task '" +
                              inst.tasks[flat.task_index].name + "', target '" +
                              flat.layer->label + "') is unreachable under the feasibility predicate",
                          index, flat.layer->label);
}

/// Edge costs from one configuration set to the next; infeasible edges are
/// +infinity and never reach the cost function.
class EdgeEvaluator {
public:
    EdgeEvaluator(const SequenceInstance& inst, SolveStats* stats)
        : inst_(inst), stats_(stats) {}

    double cost(const JointConfig& a, const JointConfig& b) {
        if (inst_.feasibility && !inst_.feasibility(a, b)) {
            return kInf;
        }
        if (stats_ != nullptr) {
            ++stats_->edge_evaluations;
        }
        return detail::motion_duration_unchecked(a, b, inst_.limits);
    }

private:
    const SequenceInstance& inst_;
    SolveStats* stats_;
};

/// Minimum-cost choice of one candidate per layer for a consecutive slice of
/// layers, starting from a fixed source configuration. Backward value pass
/// plus forward greedy reconstruction, so among all optimal assignments the
/// lexicographically smallest index vector is returned.
std::vector<std::size_t> solve_slice(const SequenceInstance& inst, const JointConfig& source,
                                     std::span<const FlatLayer> layers, std::size_t global_offset,
                                     EdgeEvaluator& edges) {
    const std::size_t n = layers.size();

    // Entry costs and one matrix per layer pair, row-major [from][to].
    std::vector<std::vector<double>> cost(n);
    cost[0].resize(layers[0].layer->candidates.size());
    for (std::size_t c = 0; c < cost[0].size(); ++c) {
        cost[0][c] = edges.cost(source, layers[0].layer->candidates[c]);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const auto& from = layers[i - 1].layer->candidates;
        const auto& to = layers[i].layer->candidates;
        cost[i].resize(from.size() * to.size());
        for (std::size_t a = 0; a < from.size(); ++a) {
            for (std::size_t b = 0; b < to.size(); ++b) {
                cost[i][a * to.size() + b] = edges.cost(from[a], to[b]);
            }
        }
    }

    // Reachability sweep to name the first blocked layer.
    std::vector<char> reachable(layers[0].layer->candidates.size());
    bool any = false;
    for (std::size_t c = 0; c < reachable.size(); ++c) {
        reachable[c] = std::isfinite(cost[0][c]);
        any = any || reachable[c];
    }
    if (!any) {
        throw_blocked(inst, layers[0], global_offset);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t from_count = layers[i - 1].layer->candidates.size();
        const std::size_t to_count = layers[i].layer->candidates.size();
        std::vector<char> next(to_count, 0);
        bool reached = false;
        for (std::size_t b = 0; b < to_count; ++b) {
            for (std::size_t a = 0; a < from_count; ++a) {
                if (reachable[a] && std::isfinite(cost[i][a * to_count + b])) {
                    next[b] = 1;
                    reached = true;
                    break;
                }
            }
        }
        if (!reached) {
            throw_blocked(inst, layers[i], global_offset + i);
        }
        reachable = std::move(next);
    }

    // Cost-to-go from every candidate of every layer to the end.
    std::vector<std::vector<double>> togo(n);
    togo[n - 1].assign(layers[n - 1].layer->candidates.size(), 0.0);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t from_count = layers[i - 1].layer->candidates.size();
        const std::size_t to_count = layers[i].layer->candidates.size();
        togo[i - 1].assign(from_count, kInf);
        for (std::size_t a = 0; a < from_count; ++a) {
            for (std::size_t b = 0; b < to_count; ++b) {
                const double value = cost[i][a * to_count + b] + togo[i][b];
                if (value < togo[i - 1][a]) {
                    togo[i - 1][a] = value;
                }
            }
        }
    }

    // Greedy forward selection; at each layer any candidate minimizing
    // edge + cost-to-go extends to an optimal assignment, so choosing the
    // lowest such index yields the lexicographically smallest optimum.
    std::vector<std::size_t> chosen(n);
    double best = kInf;
    for (std::size_t c = 0; c < cost[0].size(); ++c) {
        const double value = cost[0][c] + togo[0][c];
        if (value < best) {
            best = value;
            chosen[0] = c;
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t to_count = layers[i].layer->candidates.size();
        const std::size_t prev = chosen[i - 1];
        double best_step = kInf;
        for (std::size_t b = 0; b < to_count; ++b) {
            const double value = cost[i][prev * to_count + b] + togo[i][b];
            if (value < best_step) {
                best_step = value;
                chosen[i] = b;
            }
        }
    }
    return chosen;
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::kMethod1PerTask: return "method1";
        case Method::kMethod2Global: return "method2";
        case Method::kBruteForce: return "brute_force";
    }
    return "unknown";
}

std::size_t layer_count(const SequenceInstance& inst) {
    std::size_t n = 0;
    for (const TaskSpec& task : inst.tasks) {
        n += task.layers.size();
    }
    return n;
}

std::uint64_t assignment_count(const SequenceInstance& inst) {
    std::uint64_t product = 1;
    for (const TaskSpec& task : inst.tasks) {
        for (const TargetLayer& layer : task.layers) {
            const std::uint64_t m = layer.candidates.size();
            if (m != 0 && product > std::numeric_limits<std::uint64_t>::max() / m) {
                return std::numeric_limits<std::uint64_t>::max();
            }
            product *= m;
        }
    }
    return product;
}

double path_duration(const SequenceInstance& inst, const std::vector<std::size_t>& chosen) {
    const auto flat = flatten(inst);
    if (chosen.size() != flat.size()) {
        throw std::invalid_argument("plan has " + std::to_string(chosen.size()) +
                                    " chosen indices for " + std::to_string(flat.size()) +
                                    " layers");
    }
    double total = 0.0;
    const JointConfig* at = &inst.home;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const auto& candidates = flat[i].layer->candidates;
        if (chosen[i] >= candidates.size()) {
            throw std::invalid_argument("chosen index out of range at layer " + std::to_string(i));
        }
        const JointConfig& next = candidates[chosen[i]];
        total += detail::motion_duration_unchecked(*at, next, inst.limits);
        at = &next;
    }
    return total;
}

SequencePlan solve_global(const SequenceInstance& inst, SolveStats* stats) {
    validate_instance(inst);
    const auto start = SteadyClock::now();
    const auto flat = flatten(inst);
    EdgeEvaluator edges(inst, stats);
    SequencePlan plan;
    plan.method = Method::kMethod2Global;
    plan.chosen = solve_slice(inst, inst.home, flat, 0, edges);
    plan.total_duration_s = path_duration(inst, plan.chosen);
    plan.planning_time_s = seconds_since(start);
    return plan;
}

SequencePlan solve_per_task(const SequenceInstance& inst, SolveStats* stats) {
    validate_instance(inst);
    const auto start = SteadyClock::now();
    const auto flat = flatten(inst);
    EdgeEvaluator edges(inst, stats);

    SequencePlan plan;
    plan.method = Method::kMethod1PerTask;
    plan.chosen.reserve(flat.size());
    JointConfig source = inst.home;
    std::size_t offset = 0;
    for (const TaskSpec& task : inst.tasks) {
        const std::span<const FlatLayer> slice(flat.data() + offset, task.layers.size());
        const auto chosen = solve_slice(inst, source, slice, offset, edges);
        source = task.layers.back().candidates[chosen.back()];
        plan.chosen.insert(plan.chosen.end(), chosen.begin(), chosen.end());
        offset += task.layers.size();
    }
    plan.total_duration_s = path_duration(inst, plan.chosen);
    plan.planning_time_s = seconds_since(start);
    return plan;
}

SequencePlan brute_force(const SequenceInstance& inst) {
    validate_instance(inst);
    constexpr std::uint64_t kMaxAssignments = 100000;
    const std::uint64_t count = assignment_count(inst);
    if (count > kMaxAssignments) {
        throw InstanceTooLargeError("instance has " + std::to_string(count) +
                                    " candidate assignments; brute force is capped at " +
                                    std::to_string(kMaxAssignments));
    }

    const auto start = SteadyClock::now();
    const auto flat = flatten(inst);

    // Match the DP solvers' infeasibility report.
    {
        EdgeEvaluator probe(inst, nullptr);
        solve_slice(inst, inst.home, flat, 0, probe);
    }

    const std::size_t n = flat.size();
    std::vector<std::size_t> indices(n, 0);
    std::vector<std::size_t> best_indices;
    double best_total = kInf;
    EdgeEvaluator edges(inst, nullptr);

    while (true) {
        double total = 0.0;
        const JointConfig* at = &inst.home;
        for (std::size_t i = 0; i < n && std::isfinite(total); ++i) {
            const JointConfig& next = flat[i].layer->candidates[indices[i]];
            total += edges.cost(*at, next);
            at = &next;
        }
        if (total < best_total) {
            best_total = total;
            best_indices = indices;
        }
        // Lexicographic odometer: first strict improvement wins ties.
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++indices[i] < flat[i].layer->candidates.size()) {
                break;
            }
            indices[i] = 0;
            if (i == 0) {
                SequencePlan plan;
                plan.method = Method::kBruteForce;
                plan.chosen = std::move(best_indices);
                plan.total_duration_s = path_duration(inst, plan.chosen);
                plan.planning_time_s = seconds_since(start);
                return plan;
            }
        }
    }
}

MethodComparison compare_methods(const SequenceInstance& inst) {
    MethodComparison cmp;
    cmp.method1 = solve_per_task(inst);
    cmp.method2 = solve_global(inst);
    cmp.method2_no_worse = cmp.method2.total_duration_s <= cmp.method1.total_duration_s + 1e-9;
    return cmp;
}

}  // namespace labseq
