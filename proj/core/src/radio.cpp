#include "edgegen/radio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edgegen {

void RadioConfig::validate() const {
    if (rb_count < 1) throw InvalidInput("radio.rb_count must be >= 1");
    if (!(rb_bandwidth_hz > 0.0)) throw InvalidInput("radio.rb_bandwidth_hz must be > 0");
    if (!(shadowing_sigma_db >= 0.0)) throw InvalidInput("radio.shadowing_sigma_db must be >= 0");
    if (!(intercell_interference_w >= 0.0)) throw InvalidInput("radio.intercell_interference_w must be >= 0");
    if (pf_window_slots < 1) throw InvalidInput("radio.pf_window_slots must be >= 1");
    if (!(pf_rate_floor_bps > 0.0)) throw InvalidInput("radio.pf_rate_floor_bps must be > 0");
    if (pf_warmup_slots < 0) throw InvalidInput("radio.pf_warmup_slots must be >= 0");
}

std::size_t RbAllocation::rbs_of(UserId user) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(assignment.begin(), assignment.end(),
                      [user](const std::optional<UserId>& u) { return u && *u == user; }));
}

double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double compute_gain(double distance_m, const RadioConfig& cfg, Rng& rng) {
    if (!(distance_m > 0.0)) {
        throw InvalidInput("compute_gain: distance must be positive, got " + std::to_string(distance_m));
    }
    double shadow_db = 0.0;
    if (cfg.shadowing_sigma_db > 0.0) {
        std::normal_distribution<double> shadow(0.0, cfg.shadowing_sigma_db);
        shadow_db = shadow(rng);
    }
    const double loss_db =
        cfg.pathloss_ref_db + cfg.pathloss_exp_coeff * std::log10(distance_m / 1000.0) + shadow_db;
    return std::pow(10.0, -loss_db / 10.0);
}

double rb_sinr(const UserChannel& user, std::size_t rb, const RadioConfig& cfg) {
    const double signal = dbm_to_watts(cfg.bs_tx_power_dbm_per_rb) * user.gain_per_rb.at(rb);
    const double noise = cfg.rb_bandwidth_hz * dbm_to_watts(cfg.noise_density_dbm_hz);
    return signal / (cfg.intercell_interference_w + noise);
}

double rb_rate(const UserChannel& user, std::size_t rb, const RadioConfig& cfg) {
    return cfg.rb_bandwidth_hz * std::log2(1.0 + rb_sinr(user, rb, cfg));
}

RbAllocation allocate_proportional_fair(std::span<UserChannel> users, const RadioConfig& cfg) {
    if (users.empty()) throw InvalidInput("allocate_proportional_fair: no users");
    const auto rb_count = static_cast<std::size_t>(cfg.rb_count);
    for (const auto& u : users) {
        if (u.gain_per_rb.size() < rb_count) {
            throw InvalidInput("allocate_proportional_fair: user " + std::to_string(u.user_id) +
                               " has gains for fewer RBs than configured");
        }
    }

    const double forget = 1.0 / static_cast<double>(cfg.pf_window_slots);
    // rates[i * rb_count + rb]
    std::vector<double> rates(users.size() * rb_count);
    for (std::size_t i = 0; i < users.size(); ++i) {
        for (std::size_t rb = 0; rb < rb_count; ++rb) rates[i * rb_count + rb] = rb_rate(users[i], rb, cfg);
    }

    std::vector<double> achieved(users.size(), 0.0);
    RbAllocation alloc;
    alloc.assignment.assign(rb_count, std::nullopt);

    for (std::size_t rb = 0; rb < rb_count; ++rb) {
        std::size_t best = 0;
        double best_metric = -1.0;
        for (std::size_t i = 0; i < users.size(); ++i) {
            const double projected = (1.0 - forget) * users[i].avg_rate_ewma + forget * achieved[i];
            const double metric = rates[i * rb_count + rb] / std::max(projected, cfg.pf_rate_floor_bps);
            if (metric > best_metric ||
                (metric == best_metric && users[i].user_id < users[best].user_id)) {
                best = i;
                best_metric = metric;
            }
        }
        alloc.assignment[rb] = users[best].user_id;
        achieved[best] += rates[best * rb_count + rb];
    }

    for (std::size_t i = 0; i < users.size(); ++i) {
        users[i].avg_rate_ewma = (1.0 - forget) * users[i].avg_rate_ewma + forget * achieved[i];
    }
    return alloc;
}

double link_capacity(const UserChannel& user, const RbAllocation& alloc, const RadioConfig& cfg) {
    double capacity = 0.0;
    for (std::size_t rb = 0; rb < alloc.assignment.size(); ++rb) {
        if (alloc.assignment[rb] && *alloc.assignment[rb] == user.user_id) {
            capacity += rb_rate(user, rb, cfg);
        }
    }
    return capacity;
}

}  // namespace edgegen
