#pragma once

#include <vector>

#include "edgegen/delay.hpp"
#include "edgegen/radio.hpp"

namespace edgegen {

struct WorkloadConfig {
    int n_users = 20;
    int requests_per_user = 50;
    double mean_tokens = 1000.0;
    double token_sd = 300.0;
    std::int64_t token_min = 50;
    std::int64_t token_max = 2000;
    double quality_task_fraction = 0.5;
    double cell_radius_m = 250.0;
    double min_distance_m = 35.0;
    double regular_quality_req = 60.0;
    double preferred_quality_req = 85.0;

    void validate() const;
};

// Users uniform over the annulus [min_distance_m, cell_radius_m] around the BS,
// one block-fading gain per user replicated over every RB.
std::vector<UserChannel> generate_users(const WorkloadConfig& cfg, const RadioConfig& radio, Rng& rng);

// requests_per_user tasks per user, grouped by user. first_task_id numbers the
// batch so repeated batches keep globally unique ids.
std::vector<TaskRequest> generate_tasks(const WorkloadConfig& cfg, Rng& rng, std::size_t first_task_id = 0);

// Round-robin over users: position p of the stream is user p % n_users.
std::vector<TaskRequest> interleave_round_robin(const std::vector<TaskRequest>& grouped, int n_users);

}  // namespace edgegen
