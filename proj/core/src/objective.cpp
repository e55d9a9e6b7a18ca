#include "edgegen/objective.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace edgegen {

void RewardConfig::validate() const {
    if (!(penalty >= 0.0)) throw InvalidInput("reward.penalty must be >= 0");
}

bool quality_ok(const TaskRequest& task, Decision decision, const LlmProfile& edge, const LlmProfile& cloud) {
    const double served = decision == Decision::offload ? cloud.quality_index : edge.quality_index;
    return task.quality_req <= served;
}

StepOutcome step_reward(const TaskRequest& task, Decision decision, double delay_s, const LlmProfile& edge,
                        const LlmProfile& cloud, const RewardConfig& cfg) {
    if (!(delay_s >= 0.0)) throw InvalidInput("step_reward: negative delay");
    StepOutcome out;
    out.task_id = task.task_id;
    out.decision = decision;
    out.delay_s = delay_s;
    out.quality_ok = quality_ok(task, decision, edge, cloud);
    out.reward = cfg.target_delay_s - delay_s - (out.quality_ok ? 0.0 : cfg.penalty);
    return out;
}

double episode_objective(std::span<const StepOutcome> outcomes) {
    // Summed in sorted order so the result does not depend on outcome order.
    std::vector<double> delays;
    delays.reserve(outcomes.size());
    for (const auto& o : outcomes) delays.push_back(o.delay_s);
    std::sort(delays.begin(), delays.end());
    return std::accumulate(delays.begin(), delays.end(), 0.0);
}

}  // namespace edgegen
