#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "labseq/motion_skills.hpp"
#include "labseq/sequencer.hpp"

namespace labseq {

// --- Procedure steps --------------------------------------------------------

/// Move to a station, draw a volume, dispense it, then wash the syringe
/// `flushes` times (each wash re-drives the station's approach moves).
struct LiquidTransferStep {
    std::string task;
    double volume_ul = 0.0;
    int flushes = 0;

    bool operator==(const LiquidTransferStep&) const = default;
};

/// Hold a vial on the magnetic stirrer for a fixed time.
struct StirStep {
    std::string task;
    double duration_s = 0.0;

    bool operator==(const StirStep&) const = default;
};

/// Pour by gradual Cartesian twists, then wait for gravity filtration.
struct PourStep {
    std::string task;
    std::string profile_name;
    TwistProfile profile;
    double settle_wait_s = 0.0;

    bool operator==(const PourStep&) const = default;
};

/// Carry the uncapped vial to the auto-injector rack under a tilt bound.
struct PlaceOnRackStep {
    std::string task;
    UprightConstraint constraint;
    /// Planned carry poses checked against the constraint at compile time.
    std::vector<CartesianPose> approach_poses;

    bool operator==(const PlaceOnRackStep&) const = default;
};

/// Put the environment back so the experiment can repeat. Motion only.
struct ReconfigureStep {
    std::string task;

    bool operator==(const ReconfigureStep&) const = default;
};

/// GCMS analysis of one sample; a fixed instrument wait, no arm motion.
struct AnalyzeStep {
    double duration_s = 0.0;

    bool operator==(const AnalyzeStep&) const = default;
};

using ProcedureStep = std::variant<LiquidTransferStep, StirStep, PourStep, PlaceOnRackStep,
                                   ReconfigureStep, AnalyzeStep>;

/// Short name of the step kind, e.g. "liquid_transfer".
const char* step_kind(const ProcedureStep& step);

/// Task label the step drives through, empty for steps without arm motion.
const std::string& step_task(const ProcedureStep& step);

/// The canonical two-run Michael-reaction procedure: per run, reactant
/// transfers (5 washes each), two 5-minute stirs, two gradual pours with
/// 5-minute settles, and placement on the auto-injector rack; run 2 starts
/// with a reconfiguration; finally one 30-minute analysis per sample.
std::vector<ProcedureStep> michael_procedure();

/// A procedure split into executable runs plus the trailing analysis phase.
/// A ReconfigureStep starts a new run (and belongs to it); AnalyzeSteps are
/// collected into `analysis` regardless of position.
struct ProcedureRuns {
    std::vector<std::vector<ProcedureStep>> runs;
    std::vector<ProcedureStep> analysis;
};

ProcedureRuns split_runs(const std::vector<ProcedureStep>& steps);

// --- Schedule ---------------------------------------------------------------

struct MoveEntry {
    std::string task;
    std::string target;
    JointConfig to;
    double duration_s = 0.0;
    bool repeat = false;  // wash-cycle re-execution of a planned move
};

struct PumpEntry {
    std::string request;  // wire line without terminator
};

struct PourEntry {
    std::string task;
    std::size_t waypoint_count = 0;
    double duration_s = 0.0;
};

struct WaitEntry {
    double duration_s = 0.0;
    std::string reason;
};

using ScheduleEntry = std::variant<MoveEntry, PumpEntry, PourEntry, WaitEntry>;

struct Schedule {
    std::vector<ScheduleEntry> entries;
    SequencePlan plan;
    std::size_t planned_trajectories = 0;
    std::size_t step_count = 0;
    double offline_planning_time_s = 0.0;
};

struct CompileOptions {
    /// Simulated execution time of one pour twist increment.
    double pour_twist_duration_s = 0.5;
};

/// Solves the instance globally and interleaves the chosen motions with pump
/// commands and waits, in step order. The instance must provide the steps'
/// tasks in the same order (steps without motion consume no task). Throws
/// CompileError when a referenced task is missing or out of order.
Schedule compile(const std::vector<ProcedureStep>& steps, const SequenceInstance& inst,
                 const CompileOptions& options = {});

/// Motion entries a wash cycle adds beyond the planned ones: every flush of
/// every transfer step re-drives its task's targets once.
std::size_t expected_flush_repeats(const std::vector<ProcedureStep>& steps,
                                   const SequenceInstance& inst);

// --- Execution --------------------------------------------------------------

/// Table-I-style accounting for one executed run.
struct RunReport {
    double offline_planning_time_s = 0.0;
    std::size_t task_count = 0;
    std::size_t planned_trajectories = 0;
    std::size_t executed_trajectories = 0;
    double execution_time_min = 0.0;  // arm motion + pump motion, no waits
    double waiting_time_min = 0.0;    // stirring, settling, instrument time
    double total_time_min = 0.0;      // execution + waiting
    bool aborted = false;
    std::string error;
};

/// Advanceable time source for execution.
class Clock {
public:
    virtual ~Clock() = default;
    virtual void advance(double seconds) = 0;
    virtual double now_s() const = 0;
};

/// Jumps instantly; a 30-minute run executes in milliseconds.
class VirtualClock final : public Clock {
public:
    void advance(double seconds) override { now_ += seconds; }
    double now_s() const override { return now_; }

private:
    double now_ = 0.0;
};

/// Sleeps for real.
class WallClock final : public Clock {
public:
    void advance(double seconds) override;
    double now_s() const override;
};

struct PumpEndpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Execution stopped early: the pump replied ERR (kDevice) or the connection
/// failed mid-run (kTransport). Carries the accounting up to the failure.
class ExecutionError : public std::runtime_error {
public:
    enum class Kind { kDevice, kTransport };

    ExecutionError(Kind kind, std::string message, RunReport partial)
        : std::runtime_error(std::move(message)), kind_(kind), partial_(std::move(partial)) {}

    Kind kind() const { return kind_; }
    const RunReport& partial_report() const { return partial_; }

private:
    Kind kind_;
    RunReport partial_;
};

/// Runs the schedule in order: moves and waits advance the clock locally;
/// every pump request is sent over TCP and the next entry is not dispatched
/// until its reply arrives. Throws TransportError when the pump cannot be
/// reached at all, ExecutionError on mid-run failures.
RunReport execute(const Schedule& schedule, const PumpEndpoint& endpoint, Clock& clock);

}  // namespace labseq
