#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "labseq/errors.hpp"
#include "labseq/instance_gen.hpp"
#include "labseq/sequencer.hpp"

using namespace labseq;
using labseq::testing::jc1;
using labseq::testing::random_config;

namespace {

TaskSpec make_task(const std::string& name, std::vector<std::vector<JointConfig>> layers) {
    TaskSpec task;
    task.name = name;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        task.layers.push_back({name + "-t" + std::to_string(i + 1), std::move(layers[i])});
    }
    return task;
}

/// Two tasks where the locally best final configuration of task 1 forces a
/// long move into task 2: per-task solving walks into the trap, the global
/// solve avoids it.
SequenceInstance greedy_trap_instance() {
    SequenceInstance inst;
    inst.tasks.push_back(make_task("fetch", {{jc1(-1.0), jc1(1.2)}}));
    inst.tasks.push_back(make_task("deliver", {{jc1(2.4)}}));
    return inst;
}

}  // namespace

TEST_SUITE_BEGIN("sequencer");

TEST_CASE("single layer, single candidate") {
    SequenceInstance inst;
    inst.tasks.push_back(make_task("only", {{jc1(0.7)}}));
    const auto plan = solve_global(inst);
    REQUIRE(plan.chosen.size() == 1);
    CHECK(plan.chosen[0] == 0);
    CHECK(plan.total_duration_s == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("ties resolve to the lowest candidate index") {
    // Every layer holds three copies of the same configuration: the path cost
    // is fixed, so index choice is purely the tie-break rule.
    SequenceInstance inst;
    const auto c = jc1(0.5);
    inst.tasks.push_back(make_task("a", {{c, c, c}, {c, c, c}}));
    inst.tasks.push_back(make_task("b", {{c, c, c}}));

    for (const auto& plan : {solve_global(inst), solve_per_task(inst), brute_force(inst)}) {
        REQUIRE(plan.chosen.size() == 3);
        for (const std::size_t index : plan.chosen) {
            CHECK(index == 0);
        }
        CHECK(plan.total_duration_s == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("three layers of two candidates match exhaustive search") {
    std::mt19937_64 rng(4242);
    SequenceInstance inst;
    inst.home = random_config(rng);
    inst.tasks.push_back(make_task("t", {{random_config(rng), random_config(rng)},
                                         {random_config(rng), random_config(rng)},
                                         {random_config(rng), random_config(rng)}}));
    CHECK(assignment_count(inst) == 8);

    const auto oracle = brute_force(inst);
    const auto plan = solve_global(inst);
    CHECK(plan.chosen == oracle.chosen);
    CHECK(plan.total_duration_s == doctest::Approx(oracle.total_duration_s).epsilon(1e-12));
}

TEST_CASE("global solve equals the exhaustive oracle on random instances") {
    std::mt19937_64 rng(90210);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = random_instance(rng);
        const auto oracle = brute_force(inst);
        const auto plan = solve_global(inst);
        REQUIRE(plan.chosen == oracle.chosen);
        REQUIRE(plan.total_duration_s == doctest::Approx(oracle.total_duration_s).epsilon(1e-12));
    }
}

TEST_CASE("per-task solving") {
    SUBCASE("coincides with the global solve on single-task instances") {
        std::mt19937_64 rng(515);
        InstanceGenOptions options;
        options.min_tasks = options.max_tasks = 1;
        for (int trial = 0; trial < 20; ++trial) {
            const auto inst = random_instance(rng, options);
            const auto global = solve_global(inst);
            const auto per_task = solve_per_task(inst);
            CHECK(per_task.chosen == global.chosen);
            CHECK(per_task.total_duration_s == global.total_duration_s);
        }
    }
    SUBCASE("coincides when every layer is a singleton") {
        std::mt19937_64 rng(516);
        InstanceGenOptions options;
        options.min_candidates = options.max_candidates = 1;
        options.min_tasks = 2;
        options.max_tasks = 3;
        for (int trial = 0; trial < 10; ++trial) {
            const auto inst = random_instance(rng, options);
            const auto global = solve_global(inst);
            const auto per_task = solve_per_task(inst);
            CHECK(per_task.chosen == global.chosen);
            CHECK(per_task.total_duration_s == global.total_duration_s);
        }
    }
    SUBCASE("walks into the greedy trap") {
        const auto inst = greedy_trap_instance();
        const auto oracle = brute_force(inst);
        const auto global = solve_global(inst);
        const auto per_task = solve_per_task(inst);

        // Task 1 alone prefers -1.0 (cost 1.0 < 1.2), but the trip onward to
        // 2.4 then costs 3.4; the global path through 1.2 costs 2.4 total.
        CHECK(per_task.chosen == std::vector<std::size_t>{0, 0});
        CHECK(per_task.total_duration_s == doctest::Approx(4.4).epsilon(1e-12));
        CHECK(global.chosen == std::vector<std::size_t>{1, 0});
        CHECK(global.total_duration_s == doctest::Approx(2.4).epsilon(1e-12));
        CHECK(global.total_duration_s == doctest::Approx(oracle.total_duration_s).epsilon(1e-12));
        CHECK(per_task.total_duration_s > global.total_duration_s + 1e-9);
    }
    SUBCASE("never beats the global solve") {
        std::mt19937_64 rng(517);
        InstanceGenOptions options;
        options.max_tasks = 4;
        options.max_total_layers = 10;
        for (int trial = 0; trial < 50; ++trial) {
            const auto inst = random_instance(rng, options);
            const auto cmp = compare_methods(inst);
            CHECK(cmp.method2_no_worse);
            CHECK(cmp.method1.total_duration_s >= cmp.method2.total_duration_s - 1e-9);
        }
    }
}

TEST_CASE("compare_methods reports equal durations for one task") {
    std::mt19937_64 rng(518);
    InstanceGenOptions options;
    options.min_tasks = options.max_tasks = 1;
    const auto inst = random_instance(rng, options);
    const auto cmp = compare_methods(inst);
    CHECK(cmp.method1.total_duration_s == cmp.method2.total_duration_s);
    CHECK(cmp.method2_no_worse);
}

TEST_CASE("brute force") {
    SUBCASE("enumerates m^n assignments") {
        // Five targets with four candidates each: 1024 paths.
        std::mt19937_64 rng(519);
        SequenceInstance inst;
        std::vector<std::vector<JointConfig>> layers;
        for (int l = 0; l < 5; ++l) {
            std::vector<JointConfig> candidates;
            for (int c = 0; c < 4; ++c) {
                candidates.push_back(random_config(rng));
            }
            layers.push_back(std::move(candidates));
        }
        inst.tasks.push_back(make_task("t", std::move(layers)));
        CHECK(assignment_count(inst) == 1024);
        const auto oracle = brute_force(inst);
        const auto plan = solve_global(inst);
        CHECK(plan.chosen == oracle.chosen);
        CHECK(plan.total_duration_s == doctest::Approx(oracle.total_duration_s).epsilon(1e-12));
    }
    SUBCASE("singleton layers admit exactly one path") {
        SequenceInstance inst;
        inst.tasks.push_back(make_task("t", {{jc1(1.0)}, {jc1(2.0)}}));
        const auto plan = brute_force(inst);
        CHECK(plan.chosen == std::vector<std::size_t>{0, 0});
        CHECK(plan.total_duration_s == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("refuses oversized instances") {
        SequenceInstance inst;
        std::vector<std::vector<JointConfig>> layers;
        for (int l = 0; l < 9; ++l) {
            layers.push_back(std::vector<JointConfig>(4, jc1(0.1)));
        }
        inst.tasks.push_back(make_task("t", std::move(layers)));
        CHECK(assignment_count(inst) == 262144);
        CHECK_THROWS_AS(brute_force(inst), InstanceTooLargeError);
    }
}

TEST_CASE("feasibility predicate") {
    SequenceInstance inst;
    inst.tasks.push_back(make_task("a", {{jc1(1.0), jc1(0.5)}}));
    inst.tasks.push_back(make_task("b", {{jc1(2.0)}}));

    SUBCASE("infeasible edges are avoided when an alternative exists") {
        // Forbid the 0.5 -> 2.0 edge; the solver must route through 1.0.
        inst.feasibility = [](const JointConfig& from, const JointConfig& to) {
            return !(from == jc1(0.5) && to == jc1(2.0));
        };
        const auto plan = solve_global(inst);
        CHECK(plan.chosen == std::vector<std::size_t>{0, 0});
        const auto oracle = brute_force(inst);
        CHECK(oracle.chosen == plan.chosen);
    }
    SUBCASE("a fully blocked layer raises InfeasibleError naming it") {
        inst.feasibility = [](const JointConfig&, const JointConfig& to) {
            return !(to == jc1(2.0));
        };
        for (auto* solver : {&solve_global, &solve_per_task}) {
            try {
                (*solver)(inst, nullptr);
                FAIL("expected InfeasibleError");
            } catch (const InfeasibleError& e) {
                CHECK(e.layer_index() == 1);
                CHECK(e.label() == "b-t1");
            }
        }
        CHECK_THROWS_AS(brute_force(inst), InfeasibleError);
    }
    SUBCASE("a blocked first layer reports index 0") {
        inst.feasibility = [](const JointConfig&, const JointConfig&) { return false; };
        try {
            solve_global(inst);
            FAIL("expected InfeasibleError");
        } catch (const InfeasibleError& e) {
            CHECK(e.layer_index() == 0);
            CHECK(e.label() == "a-t1");
        }
    }
}

TEST_CASE("solvers are deterministic") {
    std::mt19937_64 rng(520);
    const auto inst = random_instance(rng);
    const auto a = solve_global(inst);
    const auto b = solve_global(inst);
    CHECK(a.chosen == b.chosen);
    CHECK(a.total_duration_s == b.total_duration_s);
    const auto c = solve_per_task(inst);
    const auto d = solve_per_task(inst);
    CHECK(c.chosen == d.chosen);
    CHECK(c.total_duration_s == d.total_duration_s);
}

TEST_CASE("global solve evaluates each consecutive-layer edge exactly once") {
    std::mt19937_64 rng(521);
    InstanceGenOptions options;
    options.max_tasks = 3;
    options.max_total_layers = 8;
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = random_instance(rng, options);

        std::vector<std::size_t> sizes;
        for (const auto& task : inst.tasks) {
            for (const auto& layer : task.layers) {
                sizes.push_back(layer.candidates.size());
            }
        }
        std::size_t expected = sizes[0];  // home -> first layer
        for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
            expected += sizes[i] * sizes[i + 1];
        }

        SolveStats stats;
        solve_global(inst, &stats);
        CHECK(stats.edge_evaluations == expected);
    }
}

TEST_CASE("removing candidates never helps") {
    std::mt19937_64 rng(522);
    InstanceGenOptions options;
    options.min_candidates = 2;
    for (int trial = 0; trial < 30; ++trial) {
        auto inst = random_instance(rng, options);
        const auto base = solve_global(inst);

        // Locate a random layer and drop one candidate from it.
        std::vector<std::pair<std::size_t, std::size_t>> flat;  // (task, layer)
        for (std::size_t t = 0; t < inst.tasks.size(); ++t) {
            for (std::size_t l = 0; l < inst.tasks[t].layers.size(); ++l) {
                flat.emplace_back(t, l);
            }
        }
        std::uniform_int_distribution<std::size_t> pick_layer(0, flat.size() - 1);
        const std::size_t flat_index = pick_layer(rng);
        const auto [t, l] = flat[flat_index];
        auto& candidates = inst.tasks[t].layers[l].candidates;
        std::uniform_int_distribution<std::size_t> pick_candidate(0, candidates.size() - 1);
        const std::size_t removed = pick_candidate(rng);
        const bool removed_chosen = base.chosen[flat_index] == removed;
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(removed));

        const auto shrunk = solve_global(inst);
        if (removed_chosen) {
            CHECK(shrunk.total_duration_s >= base.total_duration_s - 1e-12);
        } else {
            // The optimal path survives untouched.
            CHECK(shrunk.total_duration_s == doctest::Approx(base.total_duration_s).epsilon(1e-12));
        }
    }
}

TEST_CASE("scaling all velocity limits rescales the duration, not the plan") {
    std::mt19937_64 rng(523);
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = random_instance(rng);
        const auto base = solve_global(inst);
        const double factor = 4.0;
        for (double& vj : inst.limits.v) {
            vj *= factor;
        }
        const auto fast = solve_global(inst);
        CHECK(fast.chosen == base.chosen);
        CHECK(fast.total_duration_s ==
              doctest::Approx(base.total_duration_s / factor).epsilon(1e-12));
    }
}

TEST_CASE("invalid instances are rejected") {
    SequenceInstance inst;
    CHECK_THROWS_AS(solve_global(inst), std::invalid_argument);  // no tasks
    inst.tasks.push_back(TaskSpec{"empty", {}});
    CHECK_THROWS_AS(solve_global(inst), std::invalid_argument);  // task without layers
    inst.tasks[0].layers.push_back(TargetLayer{"bare", {}});
    CHECK_THROWS_AS(solve_global(inst), std::invalid_argument);  // layer without candidates
}

TEST_SUITE_END();
