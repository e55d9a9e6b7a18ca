#include "edgegen/workload.hpp"

#include <algorithm>
#include <cmath>

namespace edgegen {

void WorkloadConfig::validate() const {
    if (n_users < 1) throw InvalidInput("workload.n_users must be >= 1");
    if (requests_per_user < 1) throw InvalidInput("workload.requests_per_user must be >= 1");
    if (!(quality_task_fraction >= 0.0 && quality_task_fraction <= 1.0)) {
        throw InvalidInput("workload.quality_task_fraction must be in [0, 1]");
    }
    if (token_min < 1) throw InvalidInput("workload.token_min must be >= 1");
    if (token_min > token_max) throw InvalidInput("workload.token_min must be <= token_max");
    if (!(token_sd >= 0.0)) throw InvalidInput("workload.token_sd must be >= 0");
    if (!(min_distance_m > 0.0)) throw InvalidInput("workload.min_distance_m must be > 0");
    if (!(cell_radius_m >= min_distance_m)) throw InvalidInput("workload.cell_radius_m must be >= min_distance_m");
    for (double q : {regular_quality_req, preferred_quality_req}) {
        if (!(q >= 0.0 && q <= 100.0)) throw InvalidInput("workload quality requirements must be in [0, 100]");
    }
}

std::vector<UserChannel> generate_users(const WorkloadConfig& cfg, const RadioConfig& radio, Rng& rng) {
    cfg.validate();
    radio.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r0_sq = cfg.min_distance_m * cfg.min_distance_m;
    const double r1_sq = cfg.cell_radius_m * cfg.cell_radius_m;

    std::vector<UserChannel> users;
    users.reserve(static_cast<std::size_t>(cfg.n_users));
    for (int k = 0; k < cfg.n_users; ++k) {
        UserChannel u;
        u.user_id = static_cast<UserId>(k);
        // Area-uniform radius on the annulus.
        u.distance_m = std::sqrt(r0_sq + unit(rng) * (r1_sq - r0_sq));
        u.distance_m = std::clamp(u.distance_m, cfg.min_distance_m, cfg.cell_radius_m);
        const double gain = compute_gain(u.distance_m, radio, rng);
        u.gain_per_rb.assign(static_cast<std::size_t>(radio.rb_count), gain);
        users.push_back(std::move(u));
    }
    return users;
}

std::vector<TaskRequest> generate_tasks(const WorkloadConfig& cfg, Rng& rng, std::size_t first_task_id) {
    cfg.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> tokens(cfg.mean_tokens, cfg.token_sd);
    const auto lo = static_cast<double>(cfg.token_min);
    const auto hi = static_cast<double>(cfg.token_max);

    std::vector<TaskRequest> out;
    out.reserve(static_cast<std::size_t>(cfg.n_users) * static_cast<std::size_t>(cfg.requests_per_user));
    std::size_t next_id = first_task_id;
    for (int k = 0; k < cfg.n_users; ++k) {
        for (int i = 0; i < cfg.requests_per_user; ++i) {
            TaskRequest t;
            t.user_id = static_cast<UserId>(k);
            t.task_id = next_id++;
            // Always consume one uniform so the token stream is independent of the mix.
            t.task_type = unit(rng) < cfg.quality_task_fraction ? TaskType::quality_preferred : TaskType::regular;

            // Truncated normal by rejection; falls back to clipping when the
            // window sits far in a tail.
            double draw = tokens(rng);
            for (int attempt = 0; attempt < 1000 && (draw < lo || draw > hi); ++attempt) draw = tokens(rng);
            t.n_tokens = std::clamp(static_cast<std::int64_t>(std::llround(draw)), cfg.token_min, cfg.token_max);

            t.quality_req = t.task_type == TaskType::quality_preferred ? cfg.preferred_quality_req
                                                                       : cfg.regular_quality_req;
            out.push_back(t);
        }
    }
    return out;
}

std::vector<TaskRequest> interleave_round_robin(const std::vector<TaskRequest>& grouped, int n_users) {
    if (n_users < 1) throw InvalidInput("interleave_round_robin: n_users must be >= 1");
    std::vector<std::vector<TaskRequest>> per_user(static_cast<std::size_t>(n_users));
    for (const auto& t : grouped) {
        if (t.user_id >= per_user.size()) throw InvalidInput("interleave_round_robin: user id out of range");
        per_user[t.user_id].push_back(t);
    }
    std::vector<TaskRequest> out;
    out.reserve(grouped.size());
    for (std::size_t round = 0; out.size() < grouped.size(); ++round) {
        for (const auto& queue : per_user) {
            if (round < queue.size()) out.push_back(queue[round]);
        }
    }
    return out;
}

}  // namespace edgegen
