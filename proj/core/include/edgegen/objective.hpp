#pragma once

#include <span>

#include "edgegen/delay.hpp"

namespace edgegen {

struct RewardConfig {
    double target_delay_s = 30.0;
    double penalty = 50.0;

    void validate() const;
};

struct StepOutcome {
    std::size_t task_id = 0;
    Decision decision = Decision::local;
    double delay_s = 0.0;
    bool quality_ok = true;
    double reward = 0.0;
};

// Quality requirement met by the model that serves the decision.
bool quality_ok(const TaskRequest& task, Decision decision, const LlmProfile& edge, const LlmProfile& cloud);

// reward = target - delay - (quality_ok ? 0 : penalty)
StepOutcome step_reward(const TaskRequest& task, Decision decision, double delay_s, const LlmProfile& edge,
                        const LlmProfile& cloud, const RewardConfig& cfg);

// Total delay over all served tasks.
double episode_objective(std::span<const StepOutcome> outcomes);

}  // namespace edgegen
