#include "labseq/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "labseq/errors.hpp"
#include "labseq/net.hpp"
#include "labseq/pump.hpp"

namespace labseq {

namespace {

std::string format_volume_request(const char* verb, double volume_ul) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s %.3f", verb, volume_ul);
    return buf;
}

}  // namespace

const char* step_kind(const ProcedureStep& step) {
    return std::visit(
        [](const auto& s) -> const char* {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LiquidTransferStep>) return "liquid_transfer";
            if constexpr (std::is_same_v<T, StirStep>) return "stir";
            if constexpr (std::is_same_v<T, PourStep>) return "pour";
            if constexpr (std::is_same_v<T, PlaceOnRackStep>) return "place_on_rack";
            if constexpr (std::is_same_v<T, ReconfigureStep>) return "reconfigure";
            if constexpr (std::is_same_v<T, AnalyzeStep>) return "analyze";
        },
        step);
}

const std::string& step_task(const ProcedureStep& step) {
    static const std::string empty;
    return std::visit(
        [](const auto& s) -> const std::string& {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AnalyzeStep>) {
                return empty;
            } else {
                return s.task;
            }
        },
        step);
}

std::vector<ProcedureStep> michael_procedure() {
    const TwistProfile reaction_pour =
        stir_bar_profile(TwistProfile{122.0, 203.0, 12.2, false});
    const TwistProfile flush_pour{118.0, 201.0, 12.0, false};

    std::vector<ProcedureStep> steps;
    const auto one_run = [&]() {
        steps.push_back(LiquidTransferStep{"transfer-toluene", 80.0, 5});
        steps.push_back(LiquidTransferStep{"transfer-enone", 40.0, 5});
        steps.push_back(LiquidTransferStep{"transfer-malonate", 40.0, 5});
        steps.push_back(LiquidTransferStep{"transfer-catalyst", 20.0, 5});
        steps.push_back(StirStep{"stir-reaction", 300.0});
        steps.push_back(LiquidTransferStep{"transfer-mixture", 60.0, 5});
        steps.push_back(StirStep{"stir-dilution", 300.0});
        steps.push_back(PourStep{"pour-reaction", "reaction", reaction_pour, 300.0});
        steps.push_back(PourStep{"pour-flush", "flush", flush_pour, 300.0});
        steps.push_back(PlaceOnRackStep{"place-rack", UprightConstraint{15.0}, {}});
    };

    one_run();
    steps.push_back(ReconfigureStep{"reconfigure"});
    one_run();
    steps.push_back(AnalyzeStep{1800.0});
    steps.push_back(AnalyzeStep{1800.0});
    return steps;
}

ProcedureRuns split_runs(const std::vector<ProcedureStep>& steps) {
    ProcedureRuns out;
    out.runs.emplace_back();
    for (const ProcedureStep& step : steps) {
        if (std::holds_alternative<AnalyzeStep>(step)) {
            out.analysis.push_back(step);
            continue;
        }
        if (std::holds_alternative<ReconfigureStep>(step) && !out.runs.back().empty()) {
            out.runs.emplace_back();
        }
        out.runs.back().push_back(step);
    }
    if (out.runs.back().empty()) {
        out.runs.pop_back();
    }
    return out;
}

namespace {

/// Walks the instance's tasks in lockstep with the steps that need motion.
class TaskCursor {
public:
    explicit TaskCursor(const SequenceInstance& inst) : inst_(inst) {}

    /// Claims the next task for `step`; verifies the label matches.
    std::size_t claim(const ProcedureStep& step) {
        const std::string& label = step_task(step);
        if (next_ >= inst_.tasks.size()) {
            throw CompileError("step '" + std::string(step_kind(step)) + "' references task '" +
                                   label + "' but the instance has no task left for it",
                               step_kind(step), label);
        }
        if (inst_.tasks[next_].name != label) {
            throw CompileError("step '" + std::string(step_kind(step)) + "' references task '" +
                                   label + "' but the instance provides '" +
                                   inst_.tasks[next_].name + "' at position " +
                                   std::to_string(next_),
                               step_kind(step), label);
        }
        return next_++;
    }

    std::size_t layers_claimed_before(std::size_t task_index) const {
        std::size_t n = 0;
        for (std::size_t t = 0; t < task_index; ++t) {
            n += inst_.tasks[t].layers.size();
        }
        return n;
    }

private:
    const SequenceInstance& inst_;
    std::size_t next_ = 0;
};

}  // namespace

Schedule compile(const std::vector<ProcedureStep>& steps, const SequenceInstance& inst,
                 const CompileOptions& options) {
    Schedule schedule;
    schedule.step_count = steps.size();
    if (steps.empty()) {
        return schedule;
    }

    schedule.plan = solve_global(inst);
    schedule.planned_trajectories = schedule.plan.chosen.size();
    schedule.offline_planning_time_s = schedule.plan.planning_time_s;

    TaskCursor cursor(inst);
    JointConfig at = inst.home;

    // Chosen configuration of each layer of a task, in layer order.
    const auto chosen_configs = [&](std::size_t task_index) {
        std::vector<const JointConfig*> configs;
        const TaskSpec& task = inst.tasks[task_index];
        const std::size_t base = cursor.layers_claimed_before(task_index);
        for (std::size_t i = 0; i < task.layers.size(); ++i) {
            configs.push_back(&task.layers[i].candidates[schedule.plan.chosen[base + i]]);
        }
        return configs;
    };

    const auto emit_move = [&](std::size_t task_index, std::size_t layer, const JointConfig& to,
                               bool repeat) {
        MoveEntry move;
        move.task = inst.tasks[task_index].name;
        move.target = inst.tasks[task_index].layers[layer].label;
        move.to = to;
        move.duration_s = detail::motion_duration_unchecked(at, to, inst.limits);
        move.repeat = repeat;
        schedule.entries.push_back(std::move(move));
        at = to;
    };

    const auto emit_task_moves = [&](std::size_t task_index, std::size_t from_layer, bool repeat) {
        const auto configs = chosen_configs(task_index);
        for (std::size_t i = from_layer; i < configs.size(); ++i) {
            emit_move(task_index, i, *configs[i], repeat);
        }
    };

    for (const ProcedureStep& step : steps) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, LiquidTransferStep>) {
                    const std::size_t task_index = cursor.claim(step);
                    const auto configs = chosen_configs(task_index);
                    // Approach the draw station, draw, drive the remaining
                    // targets, dispense.
                    emit_move(task_index, 0, *configs[0], false);
                    schedule.entries.push_back(
                        PumpEntry{format_volume_request("DRAW", s.volume_ul)});
                    emit_task_moves(task_index, 1, false);
                    schedule.entries.push_back(
                        PumpEntry{format_volume_request("PUSH", s.volume_ul)});
                    // Wash cycles re-drive the station: back to the draw
                    // position, flush, and forward again.
                    for (int flush = 0; flush < s.flushes; ++flush) {
                        emit_move(task_index, 0, *configs[0], true);
                        schedule.entries.push_back(PumpEntry{"FLUSH 1"});
                        for (std::size_t i = 1; i < configs.size(); ++i) {
                            emit_move(task_index, i, *configs[i], true);
                        }
                    }
                } else if constexpr (std::is_same_v<T, StirStep>) {
                    emit_task_moves(cursor.claim(step), 0, false);
                    schedule.entries.push_back(WaitEntry{s.duration_s, "stir"});
                } else if constexpr (std::is_same_v<T, PourStep>) {
                    const std::size_t task_index = cursor.claim(step);
                    emit_task_moves(task_index, 0, false);
                    const auto waypoints = generate_pour_waypoints(s.profile);
                    PourEntry pour;
                    pour.task = inst.tasks[task_index].name;
                    pour.waypoint_count = waypoints.size();
                    pour.duration_s =
                        static_cast<double>(waypoints.size()) * options.pour_twist_duration_s;
                    schedule.entries.push_back(std::move(pour));
                    schedule.entries.push_back(WaitEntry{s.settle_wait_s, "settle"});
                } else if constexpr (std::is_same_v<T, PlaceOnRackStep>) {
                    if (!s.approach_poses.empty()) {
                        if (const auto violation = validate_upright(s.approach_poses, s.constraint)) {
                            char detail[160];
                            std::snprintf(detail, sizeof(detail),
                                          "carry pose %zu tilts %.2f deg, above the %.2f deg bound",
                                          violation->index, violation->tilt_deg,
                                          s.constraint.max_tilt_deg);
                            throw CompileError("step 'place_on_rack' (task '" + s.task + "'): " +
                                                   detail,
                                               "place_on_rack", s.task);
                        }
                    }
                    emit_task_moves(cursor.claim(step), 0, false);
                } else if constexpr (std::is_same_v<T, ReconfigureStep>) {
                    emit_task_moves(cursor.claim(step), 0, false);
                } else {
                    static_assert(std::is_same_v<T, AnalyzeStep>);
                    schedule.entries.push_back(WaitEntry{s.duration_s, "analysis"});
                }
            },
            step);
    }
    return schedule;
}

std::size_t expected_flush_repeats(const std::vector<ProcedureStep>& steps,
                                   const SequenceInstance& inst) {
    std::size_t repeats = 0;
    std::size_t task_index = 0;
    for (const ProcedureStep& step : steps) {
        if (step_task(step).empty()) {
            continue;
        }
        if (const auto* transfer = std::get_if<LiquidTransferStep>(&step)) {
            repeats += static_cast<std::size_t>(transfer->flushes) *
                       inst.tasks[task_index].layers.size();
        }
        ++task_index;
    }
    return repeats;
}

void WallClock::advance(double seconds) {
    if (seconds > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }
}

double WallClock::now_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

RunReport execute(const Schedule& schedule, const PumpEndpoint& endpoint, Clock& clock) {
    RunReport report;
    report.offline_planning_time_s = schedule.offline_planning_time_s;
    report.task_count = schedule.step_count;
    report.planned_trajectories = schedule.planned_trajectories;

    double execution_s = 0.0;
    double waiting_s = 0.0;
    const auto finalize = [&](RunReport& r) {
        r.execution_time_min = execution_s / 60.0;
        r.waiting_time_min = waiting_s / 60.0;
        r.total_time_min = r.execution_time_min + r.waiting_time_min;
    };
    const auto abort = [&](ExecutionError::Kind kind, const std::string& message) {
        report.aborted = true;
        report.error = message;
        finalize(report);
        throw ExecutionError(kind, message, report);
    };

    bool needs_pump = false;
    for (const ScheduleEntry& entry : schedule.entries) {
        if (std::holds_alternative<PumpEntry>(entry)) {
            needs_pump = true;
            break;
        }
    }

    net::LineChannel pump;
    if (needs_pump) {
        pump = net::LineChannel(net::connect_tcp(endpoint.host, endpoint.port));
    }

    for (const ScheduleEntry& entry : schedule.entries) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, MoveEntry>) {
                    clock.advance(e.duration_s);
                    execution_s += e.duration_s;
                    ++report.executed_trajectories;
                } else if constexpr (std::is_same_v<T, PourEntry>) {
                    clock.advance(e.duration_s);
                    execution_s += e.duration_s;
                } else if constexpr (std::is_same_v<T, WaitEntry>) {
                    clock.advance(e.duration_s);
                    waiting_s += e.duration_s;
                } else {
                    static_assert(std::is_same_v<T, PumpEntry>);
                    if (!pump.send_line(e.request)) {
                        abort(ExecutionError::Kind::kTransport,
                              "pump connection lost while sending '" + e.request + "'");
                    }
                    std::string reply;
                    const net::RecvStatus status = pump.recv_line(reply, 10000);
                    if (status != net::RecvStatus::kLine) {
                        abort(ExecutionError::Kind::kTransport,
                              "no reply from pump for '" + e.request + "'");
                    }
                    if (reply.rfind("ERR", 0) == 0) {
                        abort(ExecutionError::Kind::kDevice,
                              "pump refused '" + e.request + "': " + reply);
                    }
                    if (const auto duration = reply_duration(reply)) {
                        clock.advance(*duration);
                        execution_s += *duration;
                    }
                }
            },
            entry);
    }

    finalize(report);
    return report;
}

}  // namespace labseq
