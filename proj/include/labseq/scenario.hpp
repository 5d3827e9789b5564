#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "labseq/orchestrator.hpp"
#include "labseq/pump.hpp"
#include "labseq/sequencer.hpp"

namespace labseq {

/// Everything one experiment needs: the sequencing world (home, limits,
/// tasks), the pump geometry, named twist profiles, and the procedure.
/// Serialized as versioned JSON; see the README for the schema.
struct Scenario {
    int version = 1;
    JointConfig home;
    VelocityLimits velocity_limits = VelocityLimits::uniform(1.0);
    JointLimits joint_limits = JointLimits::symmetric(3.14159265358979323846);
    std::vector<TaskSpec> tasks;
    PumpConfig pump;
    std::map<std::string, TwistProfile> twist_profiles;
    std::vector<ProcedureStep> procedure;
    double pour_twist_duration_s = 0.5;
    /// When set, moves with any per-joint change above this are infeasible.
    std::optional<double> max_joint_jump_rad;

    bool operator==(const Scenario&) const = default;
};

/// Parses and validates. Throws ParseError; syntax errors carry line/column.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

nlohmann::json to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

/// Cross-checks every embedded invariant (limits, candidate bounds, labels,
/// pump geometry, profiles). Throws ParseError on the first violation.
void validate(const Scenario& scenario);

/// Instance over all tasks, in scenario order.
SequenceInstance make_instance(const Scenario& scenario);

/// Instance over the tasks the given steps reference, in step order; this is
/// the shape compile() expects. Throws CompileError on unknown labels.
SequenceInstance instance_for_steps(const Scenario& scenario,
                                    const std::vector<ProcedureStep>& steps);

// --- Reports ----------------------------------------------------------------

nlohmann::json to_json(const RunReport& report);
nlohmann::json to_json(const Schedule& schedule);
nlohmann::json plan_to_json(const SequencePlan& plan, const SequenceInstance& inst);
nlohmann::json comparison_to_json(const MethodComparison& comparison);

struct SimulationReport {
    std::vector<RunReport> runs;
    double analysis_wait_min = 0.0;
};

nlohmann::json to_json(const SimulationReport& report);

/// Splits the scenario's procedure into runs, compiles each against its own
/// sub-instance, and executes them in order against the pump endpoint.
/// Propagates ExecutionError (with partial accounting) on device failures.
SimulationReport simulate_scenario(const Scenario& scenario, const PumpEndpoint& endpoint,
                                   Clock& clock);

/// Schedules of every run, without executing. Useful for inspection.
std::vector<Schedule> compile_scenario(const Scenario& scenario);

}  // namespace labseq
