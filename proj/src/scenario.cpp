#include "labseq/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "labseq/errors.hpp"

namespace labseq {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) {
    throw ParseError(message);
}

const json& require(const json& j, const char* key, const std::string& context) {
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(context + ": missing key '" + key + "'");
    }
    return *it;
}

double as_number(const json& j, const std::string& context) {
    if (!j.is_number()) {
        fail(context + ": expected a number");
    }
    return j.get<double>();
}

std::array<double, kJointCount> as_joint_array(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != kJointCount) {
        fail(context + ": expected an array of " + std::to_string(kJointCount) + " numbers");
    }
    std::array<double, kJointCount> out{};
    for (std::size_t i = 0; i < kJointCount; ++i) {
        out[i] = as_number(j[i], context);
    }
    return out;
}

std::array<double, 3> as_vec3(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 3) {
        fail(context + ": expected an array of 3 numbers");
    }
    return {as_number(j[0], context), as_number(j[1], context), as_number(j[2], context)};
}

json joint_to_json(const std::array<double, kJointCount>& q) {
    return json(q);
}

TwistProfile parse_twist_profile(const json& j, const std::string& context) {
    TwistProfile profile;
    profile.total_angle_deg = as_number(require(j, "total_angle_deg", context), context);
    profile.total_dx_mm = as_number(require(j, "total_dx_mm", context), context);
    profile.max_angle_increment_deg =
        as_number(require(j, "max_angle_increment_deg", context), context);
    profile.stir_bar = j.value("stir_bar", false);
    return profile;
}

json twist_profile_to_json(const TwistProfile& profile) {
    return json{{"total_angle_deg", profile.total_angle_deg},
                {"total_dx_mm", profile.total_dx_mm},
                {"max_angle_increment_deg", profile.max_angle_increment_deg},
                {"stir_bar", profile.stir_bar}};
}

CartesianPose parse_pose(const json& j, const std::string& context) {
    CartesianPose pose;
    pose.position_mm = as_vec3(require(j, "position_mm", context), context);
    const json& o = require(j, "orientation_wxyz", context);
    if (!o.is_array() || o.size() != 4) {
        fail(context + ": orientation_wxyz must be an array of 4 numbers");
    }
    pose.orientation = Quaternion{as_number(o[0], context), as_number(o[1], context),
                                  as_number(o[2], context), as_number(o[3], context)};
    return pose;
}

json pose_to_json(const CartesianPose& pose) {
    return json{{"position_mm", pose.position_mm},
                {"orientation_wxyz", {pose.orientation.w, pose.orientation.x, pose.orientation.y,
                                      pose.orientation.z}}};
}

ProcedureStep parse_step(const json& j, const Scenario& scenario, std::size_t index) {
    const std::string context = "procedure[" + std::to_string(index) + "]";
    const std::string type = require(j, "type", context).get<std::string>();
    if (type == "liquid_transfer") {
        LiquidTransferStep step;
        step.task = require(j, "task", context).get<std::string>();
        step.volume_ul = as_number(require(j, "volume_ul", context), context);
        step.flushes = require(j, "flushes", context).get<int>();
        if (step.volume_ul < 0.0 || step.flushes < 0) {
            fail(context + ": volume and flushes must be non-negative");
        }
        return step;
    }
    if (type == "stir") {
        StirStep step;
        step.task = require(j, "task", context).get<std::string>();
        step.duration_s = as_number(require(j, "duration_s", context), context);
        if (step.duration_s < 0.0) {
            fail(context + ": duration must be non-negative");
        }
        return step;
    }
    if (type == "pour") {
        PourStep step;
        step.task = require(j, "task", context).get<std::string>();
        step.profile_name = require(j, "profile", context).get<std::string>();
        const auto it = scenario.twist_profiles.find(step.profile_name);
        if (it == scenario.twist_profiles.end()) {
            fail(context + ": unknown twist profile '" + step.profile_name + "'");
        }
        step.profile = it->second;
        step.settle_wait_s = as_number(require(j, "settle_wait_s", context), context);
        if (step.settle_wait_s < 0.0) {
            fail(context + ": settle wait must be non-negative");
        }
        return step;
    }
    if (type == "place_on_rack") {
        PlaceOnRackStep step;
        step.task = require(j, "task", context).get<std::string>();
        step.constraint.max_tilt_deg = as_number(require(j, "max_tilt_deg", context), context);
        if (const auto it = j.find("approach_poses"); it != j.end()) {
            for (const json& p : *it) {
                step.approach_poses.push_back(parse_pose(p, context));
            }
        }
        return step;
    }
    if (type == "reconfigure") {
        ReconfigureStep step;
        step.task = require(j, "task", context).get<std::string>();
        return step;
    }
    if (type == "analyze") {
        AnalyzeStep step;
        step.duration_s = as_number(require(j, "duration_s", context), context);
        if (step.duration_s < 0.0) {
            fail(context + ": duration must be non-negative");
        }
        return step;
    }
    fail(context + ": unknown step type '" + type + "'");
}

json step_to_json(const ProcedureStep& step) {
    json j{{"type", step_kind(step)}};
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LiquidTransferStep>) {
                j["task"] = s.task;
                j["volume_ul"] = s.volume_ul;
                j["flushes"] = s.flushes;
            } else if constexpr (std::is_same_v<T, StirStep>) {
                j["task"] = s.task;
                j["duration_s"] = s.duration_s;
            } else if constexpr (std::is_same_v<T, PourStep>) {
                j["task"] = s.task;
                j["profile"] = s.profile_name;
                j["settle_wait_s"] = s.settle_wait_s;
            } else if constexpr (std::is_same_v<T, PlaceOnRackStep>) {
                j["task"] = s.task;
                j["max_tilt_deg"] = s.constraint.max_tilt_deg;
                if (!s.approach_poses.empty()) {
                    json poses = json::array();
                    for (const CartesianPose& p : s.approach_poses) {
                        poses.push_back(pose_to_json(p));
                    }
                    j["approach_poses"] = std::move(poses);
                }
            } else if constexpr (std::is_same_v<T, ReconfigureStep>) {
                j["task"] = s.task;
            } else {
                static_assert(std::is_same_v<T, AnalyzeStep>);
                j["duration_s"] = s.duration_s;
            }
        },
        step);
    return j;
}

PumpConfig parse_pump(const json& j) {
    PumpConfig cfg;
    cfg.step_angle_deg = j.value("step_angle_deg", cfg.step_angle_deg);
    cfg.microstep_divisor = j.value("microstep_divisor", cfg.microstep_divisor);
    cfg.lead_pitch_mm = j.value("lead_pitch_mm", cfg.lead_pitch_mm);
    cfg.stroke_length_mm = j.value("stroke_length_mm", cfg.stroke_length_mm);
    cfg.capacity_ul = j.value("capacity_ul", cfg.capacity_ul);
    cfg.step_rate = j.value("step_rate_usteps_per_s", cfg.step_rate);
    return cfg;
}

json pump_to_json(const PumpConfig& cfg) {
    return json{{"step_angle_deg", cfg.step_angle_deg},
                {"microstep_divisor", cfg.microstep_divisor},
                {"lead_pitch_mm", cfg.lead_pitch_mm},
                {"stroke_length_mm", cfg.stroke_length_mm},
                {"capacity_ul", cfg.capacity_ul},
                {"step_rate_usteps_per_s", cfg.step_rate}};
}

std::pair<std::size_t, std::size_t> line_column_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("JSON syntax error: ") + e.what(), line, column);
    }

    try {
        Scenario scenario;
        scenario.version = require(j, "version", "scenario").get<int>();
        if (scenario.version != 1) {
            fail("unsupported scenario version " + std::to_string(scenario.version));
        }
        scenario.home.q = as_joint_array(require(j, "home", "scenario"), "home");
        if (const auto it = j.find("velocity_limits"); it != j.end()) {
            scenario.velocity_limits.v = as_joint_array(*it, "velocity_limits");
        }
        if (const auto it = j.find("joint_limits"); it != j.end()) {
            scenario.joint_limits.lower =
                as_joint_array(require(*it, "lower", "joint_limits"), "joint_limits.lower");
            scenario.joint_limits.upper =
                as_joint_array(require(*it, "upper", "joint_limits"), "joint_limits.upper");
        }

        const json& tasks = require(j, "tasks", "scenario");
        if (!tasks.is_array()) {
            fail("tasks: expected an array");
        }
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            const std::string tctx = "tasks[" + std::to_string(t) + "]";
            TaskSpec task;
            task.name = require(tasks[t], "name", tctx).get<std::string>();
            const json& targets = require(tasks[t], "targets", tctx);
            for (std::size_t l = 0; l < targets.size(); ++l) {
                const std::string lctx = tctx + ".targets[" + std::to_string(l) + "]";
                TargetLayer layer;
                layer.label = require(targets[l], "label", lctx).get<std::string>();
                const json& candidates = require(targets[l], "candidates", lctx);
                if (!candidates.is_array() || candidates.empty()) {
                    fail(lctx + ": candidates must be a non-empty array");
                }
                for (const json& c : candidates) {
                    JointConfig config;
                    config.q = as_joint_array(c, lctx + ".candidates");
                    layer.candidates.push_back(config);
                }
                task.layers.push_back(std::move(layer));
            }
            scenario.tasks.push_back(std::move(task));
        }

        if (const auto it = j.find("pump"); it != j.end()) {
            scenario.pump = parse_pump(*it);
        }
        if (const auto it = j.find("twist_profiles"); it != j.end()) {
            for (const auto& [name, value] : it->items()) {
                scenario.twist_profiles[name] =
                    parse_twist_profile(value, "twist_profiles." + name);
            }
        }
        if (const auto it = j.find("pour_twist_duration_s"); it != j.end()) {
            scenario.pour_twist_duration_s = as_number(*it, "pour_twist_duration_s");
        }
        if (const auto it = j.find("max_joint_jump_rad"); it != j.end() && !it->is_null()) {
            scenario.max_joint_jump_rad = as_number(*it, "max_joint_jump_rad");
        }
        if (const auto it = j.find("procedure"); it != j.end()) {
            for (std::size_t i = 0; i < it->size(); ++i) {
                scenario.procedure.push_back(parse_step((*it)[i], scenario, i));
            }
        }

        validate(scenario);
        return scenario;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

json to_json(const Scenario& scenario) {
    json tasks = json::array();
    for (const TaskSpec& task : scenario.tasks) {
        json targets = json::array();
        for (const TargetLayer& layer : task.layers) {
            json candidates = json::array();
            for (const JointConfig& c : layer.candidates) {
                candidates.push_back(joint_to_json(c.q));
            }
            targets.push_back(json{{"label", layer.label}, {"candidates", std::move(candidates)}});
        }
        tasks.push_back(json{{"name", task.name}, {"targets", std::move(targets)}});
    }

    json profiles = json::object();
    for (const auto& [name, profile] : scenario.twist_profiles) {
        profiles[name] = twist_profile_to_json(profile);
    }

    json steps = json::array();
    for (const ProcedureStep& step : scenario.procedure) {
        steps.push_back(step_to_json(step));
    }

    json j{{"version", scenario.version},
           {"home", joint_to_json(scenario.home.q)},
           {"velocity_limits", json(scenario.velocity_limits.v)},
           {"joint_limits",
            json{{"lower", json(scenario.joint_limits.lower)},
                 {"upper", json(scenario.joint_limits.upper)}}},
           {"tasks", std::move(tasks)},
           {"pump", pump_to_json(scenario.pump)},
           {"twist_profiles", std::move(profiles)},
           {"procedure", std::move(steps)},
           {"pour_twist_duration_s", scenario.pour_twist_duration_s}};
    if (scenario.max_joint_jump_rad) {
        j["max_joint_jump_rad"] = *scenario.max_joint_jump_rad;
    }
    return j;
}

std::string serialize_scenario(const Scenario& scenario) {
    return to_json(scenario).dump(2) + "\n";
}

void validate(const Scenario& scenario) {
    try {
        validate(scenario.velocity_limits);
        validate(scenario.joint_limits);
        validate(scenario.home, scenario.joint_limits);
        validate(scenario.pump);
        std::set<std::string> task_names;
        for (const TaskSpec& task : scenario.tasks) {
            if (task.layers.empty()) {
                fail("task '" + task.name + "' has no targets");
            }
            task_names.insert(task.name);
            for (const TargetLayer& layer : task.layers) {
                if (layer.candidates.empty()) {
                    fail("target '" + layer.label + "' has no candidates");
                }
                for (const JointConfig& c : layer.candidates) {
                    validate(c, scenario.joint_limits);
                }
            }
        }
        for (const auto& entry : scenario.twist_profiles) {
            validate(entry.second);
        }
        for (const ProcedureStep& step : scenario.procedure) {
            const std::string& task = step_task(step);
            if (!task.empty() && task_names.count(task) == 0) {
                fail("procedure step '" + std::string(step_kind(step)) +
                     "' references unknown task '" + task + "'");
            }
        }
        if (scenario.max_joint_jump_rad && !(*scenario.max_joint_jump_rad > 0.0)) {
            fail("max_joint_jump_rad must be positive");
        }
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

namespace {

EdgeFeasibility feasibility_for(const Scenario& scenario) {
    if (!scenario.max_joint_jump_rad) {
        return {};
    }
    const double jump = *scenario.max_joint_jump_rad;
    return [jump](const JointConfig& a, const JointConfig& b) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            if (std::abs(a.q[j] - b.q[j]) > jump) {
                return false;
            }
        }
        return true;
    };
}

}  // namespace

SequenceInstance make_instance(const Scenario& scenario) {
    SequenceInstance inst;
    inst.home = scenario.home;
    inst.tasks = scenario.tasks;
    inst.limits = scenario.velocity_limits;
    inst.feasibility = feasibility_for(scenario);
    return inst;
}

SequenceInstance instance_for_steps(const Scenario& scenario,
                                    const std::vector<ProcedureStep>& steps) {
    SequenceInstance inst;
    inst.home = scenario.home;
    inst.limits = scenario.velocity_limits;
    inst.feasibility = feasibility_for(scenario);
    for (const ProcedureStep& step : steps) {
        const std::string& label = step_task(step);
        if (label.empty()) {
            continue;
        }
        bool found = false;
        for (const TaskSpec& task : scenario.tasks) {
            if (task.name == label) {
                inst.tasks.push_back(task);
                found = true;
                break;
            }
        }
        if (!found) {
            throw CompileError("step '" + std::string(step_kind(step)) +
                                   "' references task '" + label +
                                   "' which the scenario does not define",
                               step_kind(step), label);
        }
    }
    return inst;
}

json to_json(const RunReport& report) {
    return json{{"offline_planning_time_s", report.offline_planning_time_s},
                {"task_count", report.task_count},
                {"planned_trajectories", report.planned_trajectories},
                {"executed_trajectories", report.executed_trajectories},
                {"execution_time_min", report.execution_time_min},
                {"waiting_time_min", report.waiting_time_min},
                {"total_time_min", report.total_time_min},
                {"aborted", report.aborted},
                {"error", report.error}};
}

json to_json(const Schedule& schedule) {
    json entries = json::array();
    for (const ScheduleEntry& entry : schedule.entries) {
        entries.push_back(std::visit(
            [](const auto& e) -> json {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, MoveEntry>) {
                    return json{{"kind", "MOVE"},
                                {"task", e.task},
                                {"target", e.target},
                                {"to", json(e.to.q)},
                                {"duration_s", e.duration_s},
                                {"repeat", e.repeat}};
                } else if constexpr (std::is_same_v<T, PumpEntry>) {
                    return json{{"kind", "PUMP"}, {"request", e.request}};
                } else if constexpr (std::is_same_v<T, PourEntry>) {
                    return json{{"kind", "POUR"},
                                {"task", e.task},
                                {"waypoints", e.waypoint_count},
                                {"duration_s", e.duration_s}};
                } else {
                    static_assert(std::is_same_v<T, WaitEntry>);
                    return json{{"kind", "WAIT"},
                                {"duration_s", e.duration_s},
                                {"reason", e.reason}};
                }
            },
            entry));
    }
    return json{{"version", 1},
                {"planned_trajectories", schedule.planned_trajectories},
                {"step_count", schedule.step_count},
                {"entries", std::move(entries)}};
}

json plan_to_json(const SequencePlan& plan, const SequenceInstance& inst) {
    json chosen = json::array();
    std::size_t flat = 0;
    for (const TaskSpec& task : inst.tasks) {
        for (const TargetLayer& layer : task.layers) {
            chosen.push_back(json{{"task", task.name},
                                  {"target", layer.label},
                                  {"candidate", plan.chosen[flat]}});
            ++flat;
        }
    }
    return json{{"version", 1},
                {"method", to_string(plan.method)},
                {"total_duration_s", plan.total_duration_s},
                {"planning_time_s", plan.planning_time_s},
                {"chosen", std::move(chosen)}};
}

json comparison_to_json(const MethodComparison& comparison) {
    const auto row = [](const SequencePlan& plan) {
        return json{{"method", to_string(plan.method)},
                    {"planning_time_s", plan.planning_time_s},
                    {"trajectory_duration_s", plan.total_duration_s}};
    };
    return json{{"version", 1},
                {"rows", json::array({row(comparison.method1), row(comparison.method2)})},
                {"method2_no_worse", comparison.method2_no_worse}};
}

json to_json(const SimulationReport& report) {
    json runs = json::array();
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        json r = to_json(report.runs[i]);
        r["run"] = i + 1;
        runs.push_back(std::move(r));
    }
    return json{{"version", 1},
                {"runs", std::move(runs)},
                {"analysis_wait_min", report.analysis_wait_min}};
}

std::vector<Schedule> compile_scenario(const Scenario& scenario) {
    const ProcedureRuns split = split_runs(scenario.procedure);
    std::vector<Schedule> schedules;
    for (const auto& run_steps : split.runs) {
        const SequenceInstance inst = instance_for_steps(scenario, run_steps);
        CompileOptions options;
        options.pour_twist_duration_s = scenario.pour_twist_duration_s;
        schedules.push_back(compile(run_steps, inst, options));
    }
    return schedules;
}

SimulationReport simulate_scenario(const Scenario& scenario, const PumpEndpoint& endpoint,
                                   Clock& clock) {
    const ProcedureRuns split = split_runs(scenario.procedure);
    SimulationReport report;
    for (const auto& run_steps : split.runs) {
        const SequenceInstance inst = instance_for_steps(scenario, run_steps);
        CompileOptions options;
        options.pour_twist_duration_s = scenario.pour_twist_duration_s;
        const Schedule schedule = compile(run_steps, inst, options);
        report.runs.push_back(execute(schedule, endpoint, clock));
    }
    for (const ProcedureStep& step : split.analysis) {
        const double wait = std::get<AnalyzeStep>(step).duration_s;
        clock.advance(wait);
        report.analysis_wait_min += wait / 60.0;
    }
    return report;
}

}  // namespace labseq
