#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "edgegen/workload.hpp"
#include "oracles.hpp"

using namespace edgegen;

TEST(GenerateTasks, CountsIdsAndRanges) {
    WorkloadConfig cfg;
    Rng rng(3);
    const auto tasks = generate_tasks(cfg, rng, 100);
    ASSERT_EQ(tasks.size(), 1000u);
    std::set<std::size_t> ids;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        ids.insert(t.task_id);
        EXPECT_EQ(t.task_id, 100 + i);
        EXPECT_EQ(t.user_id, i / 50);
        EXPECT_GE(t.n_tokens, cfg.token_min);
        EXPECT_LE(t.n_tokens, cfg.token_max);
        EXPECT_EQ(t.quality_req, t.task_type == TaskType::quality_preferred ? 85.0 : 60.0);
    }
    EXPECT_EQ(ids.size(), tasks.size());
}

TEST(GenerateTasks, TruncatedNormalMoments) {
    WorkloadConfig cfg;
    cfg.n_users = 100;
    cfg.requests_per_user = 400;
    Rng rng(11);
    const auto tasks = generate_tasks(cfg, rng);
    double sum = 0.0;
    std::size_t preferred = 0;
    for (const auto& t : tasks) {
        sum += static_cast<double>(t.n_tokens);
        preferred += t.task_type == TaskType::quality_preferred;
    }
    const double n = static_cast<double>(tasks.size());
    // standard error of the mean is about 1.5 tokens here
    EXPECT_NEAR(sum / n, reference::truncated_normal_mean(1000, 300, 50, 2000), 6.0);
    EXPECT_NEAR(static_cast<double>(preferred) / n, 0.5, 0.015);
}

TEST(GenerateTasks, FractionExtremes) {
    WorkloadConfig cfg;
    cfg.quality_task_fraction = 0.0;
    Rng a(1);
    for (const auto& t : generate_tasks(cfg, a)) EXPECT_EQ(t.task_type, TaskType::regular);
    cfg.quality_task_fraction = 1.0;
    Rng b(1);
    for (const auto& t : generate_tasks(cfg, b)) EXPECT_EQ(t.task_type, TaskType::quality_preferred);
}

TEST(GenerateTasks, TokenStreamIndependentOfMix) {
    WorkloadConfig lo;
    lo.quality_task_fraction = 0.1;
    WorkloadConfig hi = lo;
    hi.quality_task_fraction = 0.9;
    Rng a(8);
    Rng b(8);
    const auto ta = generate_tasks(lo, a);
    const auto tb = generate_tasks(hi, b);
    for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(ta[i].n_tokens, tb[i].n_tokens);
}

TEST(GenerateTasks, DegenerateWindowClamps) {
    WorkloadConfig cfg;
    cfg.token_min = 5000;
    cfg.token_max = 5000;
    Rng rng(2);
    for (const auto& t : generate_tasks(cfg, rng)) EXPECT_EQ(t.n_tokens, 5000);
}

TEST(GenerateTasks, SameSeedSameStream) {
    WorkloadConfig cfg;
    Rng a(123);
    Rng b(123);
    const auto ta = generate_tasks(cfg, a);
    const auto tb = generate_tasks(cfg, b);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        EXPECT_EQ(ta[i].n_tokens, tb[i].n_tokens);
        EXPECT_EQ(ta[i].task_type, tb[i].task_type);
    }
}

TEST(GenerateUsers, InsideAnnulusWithReplicatedGain) {
    WorkloadConfig cfg;
    RadioConfig radio;
    Rng rng(4);
    const auto users = generate_users(cfg, radio, rng);
    ASSERT_EQ(users.size(), 20u);
    for (std::size_t k = 0; k < users.size(); ++k) {
        EXPECT_EQ(users[k].user_id, k);
        EXPECT_GE(users[k].distance_m, cfg.min_distance_m);
        EXPECT_LE(users[k].distance_m, cfg.cell_radius_m);
        ASSERT_EQ(users[k].gain_per_rb.size(), 100u);
        for (double g : users[k].gain_per_rb) EXPECT_EQ(g, users[k].gain_per_rb.front());
    }
}

TEST(GenerateUsers, AreaUniformRadius) {
    WorkloadConfig cfg;
    cfg.n_users = 20000;
    cfg.min_distance_m = 1.0;
    RadioConfig radio;
    radio.rb_count = 1;
    Rng rng(6);
    const auto users = generate_users(cfg, radio, rng);
    // P(d <= R/2) = 1/4 for an area-uniform disc
    std::size_t inner = 0;
    for (const auto& u : users) inner += u.distance_m <= cfg.cell_radius_m / 2.0;
    EXPECT_NEAR(static_cast<double>(inner) / users.size(), 0.25, 0.015);
}

TEST(InterleaveRoundRobin, UserCycle) {
    WorkloadConfig cfg;
    cfg.n_users = 3;
    cfg.requests_per_user = 4;
    Rng rng(1);
    const auto stream = interleave_round_robin(generate_tasks(cfg, rng), 3);
    ASSERT_EQ(stream.size(), 12u);
    for (std::size_t p = 0; p < stream.size(); ++p) EXPECT_EQ(stream[p].user_id, p % 3);
    EXPECT_THROW(interleave_round_robin(stream, 0), InvalidInput);
    EXPECT_THROW(interleave_round_robin(stream, 2), InvalidInput);
}

TEST(WorkloadConfig, Validation) {
    WorkloadConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.quality_task_fraction = 1.5;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = WorkloadConfig{};
    cfg.token_min = 3000;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = WorkloadConfig{};
    cfg.n_users = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = WorkloadConfig{};
    cfg.cell_radius_m = 10.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}
