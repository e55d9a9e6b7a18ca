#pragma once

#include <optional>
#include <span>
#include <vector>

#include "edgegen/common.hpp"

namespace edgegen {

// Downlink radio parameters of a single OFDMA cell.
//
// Interference from neighbouring cells is folded into one aggregate power
// (intercell_interference_w); zero models an isolated cell.
struct RadioConfig {
    int rb_count = 100;
    double rb_bandwidth_hz = 180e3;
    double bs_tx_power_dbm_per_rb = 20.0;  // 40 dBm split over 100 RBs
    double noise_density_dbm_hz = -174.0;
    double intercell_interference_w = 0.0;
    double pathloss_ref_db = 128.1;
    double pathloss_exp_coeff = 37.6;  // dB per decade of distance in km
    double shadowing_sigma_db = 8.0;

    // Proportional-fair scheduler state.
    int pf_window_slots = 100;
    double pf_rate_floor_bps = 1.0;
    int pf_warmup_slots = 500;

    void validate() const;
};

struct UserChannel {
    UserId user_id = 0;
    double distance_m = 0.0;
    std::vector<double> gain_per_rb;  // linear power gain
    double avg_rate_ewma = 0.0;       // bits/s
};

// RB index -> serving user. Unassigned RBs hold nullopt.
struct RbAllocation {
    std::vector<std::optional<UserId>> assignment;

    std::size_t rbs_of(UserId user) const noexcept;
};

double dbm_to_watts(double dbm) noexcept;

// Path loss in dB plus a lognormal shadowing draw from rng.
double compute_gain(double distance_m, const RadioConfig& cfg, Rng& rng);

double rb_sinr(const UserChannel& user, std::size_t rb, const RadioConfig& cfg);
double rb_rate(const UserChannel& user, std::size_t rb, const RadioConfig& cfg);

// One scheduling slot. RBs are assigned in index order to the user maximising
// rate / max(projected_avg, floor); projected_avg already counts the RBs the
// user has won earlier in the same slot, so identical users alternate instead
// of one user sweeping the whole band. Ties go to the lowest user_id. On return
// each user's avg_rate_ewma holds (1 - 1/T) * old + (1/T) * achieved.
RbAllocation allocate_proportional_fair(std::span<UserChannel> users, const RadioConfig& cfg);

// Shannon capacity summed over the RBs assigned to the user, bits/s.
double link_capacity(const UserChannel& user, const RbAllocation& alloc, const RadioConfig& cfg);

}  // namespace edgegen
