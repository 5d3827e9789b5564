#include "labseq/instance_gen.hpp"

#include <algorithm>
#include <string>

namespace labseq {

SequenceInstance random_instance(std::mt19937_64& rng, const InstanceGenOptions& options) {
    std::uniform_int_distribution<std::size_t> task_count(options.min_tasks, options.max_tasks);
    std::uniform_int_distribution<std::size_t> layer_count(options.min_layers_per_task,
                                                           options.max_layers_per_task);
    std::uniform_int_distribution<std::size_t> candidate_count(options.min_candidates,
                                                               options.max_candidates);
    std::uniform_real_distribution<double> angle(-options.joint_range, options.joint_range);

    SequenceInstance inst;
    inst.limits = VelocityLimits::uniform(1.0);

    const std::size_t tasks = task_count(rng);
    std::size_t total_layers = 0;
    for (std::size_t t = 0; t < tasks; ++t) {
        TaskSpec task;
        task.name = "task-" + std::to_string(t + 1);
        std::size_t layers = layer_count(rng);
        layers = std::min(layers, options.max_total_layers - total_layers);
        if (layers == 0) {
            if (total_layers == 0) {
                layers = 1;  // an instance needs at least one layer
            } else {
                break;
            }
        }
        total_layers += layers;
        for (std::size_t l = 0; l < layers; ++l) {
            TargetLayer layer;
            layer.label = task.name + "-target-" + std::to_string(l + 1);
            const std::size_t candidates = candidate_count(rng);
            for (std::size_t c = 0; c < candidates; ++c) {
                JointConfig config;
                for (double& qj : config.q) {
                    qj = angle(rng);
                }
                layer.candidates.push_back(config);
            }
            task.layers.push_back(std::move(layer));
        }
        inst.tasks.push_back(std::move(task));
    }
    return inst;
}

}  // namespace labseq
