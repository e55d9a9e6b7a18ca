#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "edgegen/runner.hpp"

using namespace edgegen;
using json = nlohmann::json;

namespace {

ExperimentConfig small_config(const std::string& policy, std::size_t steps = 300) {
    ExperimentConfig cfg;
    cfg.policy.name = policy;
    cfg.steps = steps;
    cfg.replications = 2;
    cfg.radio.pf_warmup_slots = 50;
    return cfg;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("edgegen_runner_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

class GarbleOracle final : public DecisionOracle {
public:
    std::string answer(const MetaPrompt&) override { return "no idea"; }
};

}  // namespace

TEST(Config, EmptyObjectGivesDefaults) {
    const auto cfg = experiment_config_from_json("{}");
    EXPECT_EQ(cfg.steps, 2000u);
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.policy.name, "icl");
    EXPECT_EQ(cfg.edge_profile, "llama3-8b");
    EXPECT_EQ(cfg.cloud_profile, "gpt-class-cloud");
    EXPECT_EQ(cfg.oracle, OracleKind::mock);
    EXPECT_EQ(cfg.reward.target_delay_s, 30.0);
}

TEST(Config, ReadsNestedSections) {
    const auto cfg = experiment_config_from_json(R"({
        "steps": 10, "seed": 7, "edge_profile": "gemma-7b", "cloud_profile": "gemini-1.5-pro",
        "timing_interpretation": "first_token",
        "radio": {"rb_count": 50}, "delay": {"backhaul_s": 0.1},
        "workload": {"quality_task_fraction": 0.25}, "reward": {"penalty": 80},
        "policy": {"name": "q_learning", "epsilon_start": 0.5, "learning_rate": 0.2},
        "endpoint": {"timeout_s": 5}
    })");
    EXPECT_EQ(cfg.steps, 10u);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.edge_profile, "gemma-7b");
    EXPECT_EQ(cfg.timing, TimingInterpretation::first_token);
    EXPECT_EQ(cfg.radio.rb_count, 50);
    EXPECT_EQ(cfg.delay.backhaul_s, 0.1);
    EXPECT_EQ(cfg.workload.quality_task_fraction, 0.25);
    EXPECT_EQ(cfg.reward.penalty, 80.0);
    EXPECT_EQ(cfg.policy.name, "q_learning");
    EXPECT_EQ(cfg.policy.epsilon.start, 0.5);
    EXPECT_EQ(cfg.policy.learning_rate, 0.2);
    EXPECT_EQ(cfg.endpoint.timeout_s, 5.0);
}

TEST(Config, Rejections) {
    EXPECT_THROW(experiment_config_from_json(R"({"steps": 0})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"stepz": 10})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"radio": {"rb_cnt": 10}})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"policy": {"name": "oracle_god"}})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"steps": "many"})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"steps": -5})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"seed": 1.5})"), ConfigError);
    EXPECT_THROW(experiment_config_from_json("[1, 2]"), ConfigError);
    EXPECT_THROW(experiment_config_from_json("{"), ConfigError);
    EXPECT_THROW(experiment_config_from_json(R"({"oracle": "replay"})"), ConfigError);
    EXPECT_THROW(load_experiment_config("/nonexistent/config.json"), IoError);
}

TEST(Config, JsonRoundTrip) {
    auto cfg = small_config("icl_latest", 123);
    cfg.workload.mean_tokens = 812.5;
    cfg.policy.epsilon.floor = 0.01;
    const auto text = to_json_text(cfg);
    EXPECT_EQ(to_json_text(experiment_config_from_json(text)), text);
}

TEST(Config, ShippedConfigsParse) {
    const auto dir = std::filesystem::path(EDGEGEN_SOURCE_DIR) / "configs";
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_experiment_config(entry.path())) << entry.path();
        ++seen;
    }
    EXPECT_GE(seen, 1u);
}

TEST(RunEpisode, DeterministicPerSeed) {
    const auto cfg = small_config("icl");
    const auto a = metrics_csv(run_episode(cfg, 5));
    const auto b = metrics_csv(run_episode(cfg, 5));
    const auto c = metrics_csv(run_episode(cfg, 6));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(RunEpisode, StepRecordsAreConsistent) {
    const auto cfg = small_config("icl");
    const auto m = run_episode(cfg, 9);
    ASSERT_EQ(m.steps.size(), cfg.steps);
    double cum = 0.0;
    std::size_t qp = 0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < m.steps.size(); ++i) {
        const auto& s = m.steps[i];
        EXPECT_EQ(s.step, i);
        EXPECT_EQ(s.user_id, i % static_cast<std::size_t>(cfg.workload.n_users));
        EXPECT_EQ(s.token_bin, s.n_tokens / 200);
        EXPECT_GT(s.capacity_bps, 0.0);
        EXPECT_GT(s.delay_s, 0.0);
        const double penalty = s.quality_ok ? 0.0 : cfg.reward.penalty;
        EXPECT_NEAR(s.reward, cfg.reward.target_delay_s - s.delay_s - penalty, 1e-9);
        cum += s.reward;
        EXPECT_NEAR(s.cum_reward, cum, 1e-9);
        if (s.task_type == TaskType::quality_preferred) {
            ++qp;
            ok += s.quality_ok;
            EXPECT_EQ(s.quality_ok, s.decision == Decision::offload);
        } else {
            EXPECT_TRUE(s.quality_ok);
        }
        EXPECT_NEAR(s.success_rate, qp == 0 ? 1.0 : static_cast<double>(ok) / qp, 1e-12);
    }
    EXPECT_NEAR(m.cumulative_reward, cum, 1e-9);
    EXPECT_EQ(m.quality_tasks, qp);
    EXPECT_NEAR(m.mean_reward, cum / cfg.steps, 1e-12);
}

TEST(RunEpisode, StepsBeyondOneBatchRegenerateTasks) {
    auto cfg = small_config("bruteforce", 250);
    cfg.workload.n_users = 4;
    cfg.workload.requests_per_user = 10;
    const auto m = run_episode(cfg, 1);
    std::set<std::size_t> ids;
    for (const auto& s : m.steps) ids.insert(s.task_id);
    EXPECT_EQ(ids.size(), 250u);
}

TEST(RunEpisode, BruteforceMatchesBestOfStaticPerStep) {
    const auto bf = run_episode(small_config("bruteforce"), 3);
    const auto loc = run_episode(small_config("always_local"), 3);
    const auto off = run_episode(small_config("always_offload"), 3);
    for (std::size_t i = 0; i < bf.steps.size(); ++i) {
        // same task stream and radio trace regardless of policy
        ASSERT_EQ(bf.steps[i].task_id, loc.steps[i].task_id);
        ASSERT_EQ(bf.steps[i].capacity_bps, off.steps[i].capacity_bps);
        EXPECT_EQ(bf.steps[i].reward, std::max(loc.steps[i].reward, off.steps[i].reward));
    }
    EXPECT_EQ(bf.success_rate, 1.0);
}

TEST(RunEpisode, OracleFailureCarriesStepContext) {
    const auto cfg = small_config("icl", 5);
    OracleFactory garble = [](const ExperimentConfig&, std::uint64_t) { return std::make_unique<GarbleOracle>(); };
    try {
        run_episode(cfg, 1, garble);
        FAIL() << "expected OracleProtocolError";
    } catch (const OracleProtocolError& e) {
        EXPECT_NE(std::string(e.what()).find("step 0"), std::string::npos);
    }
}

TEST(RunEpisode, IclBeatsNoExplorationAndApproachesBruteforce) {
    auto cfg = small_config("icl", 2000);
    const auto icl = run_episode(cfg, 42);
    cfg.policy.name = "icl_no_explore";
    const auto greedy = run_episode(cfg, 42);
    cfg.policy.name = "bruteforce";
    const auto bf = run_episode(cfg, 42);
    EXPECT_GT(icl.final_window_mean_reward, greedy.final_window_mean_reward);
    EXPECT_GT(icl.final_window_mean_reward, icl.first_window_mean_reward);
    EXPECT_LE(icl.final_window_mean_reward, bf.final_window_mean_reward + 1e-9);
}

TEST(RunEpisode, ConvergedIclMeetsQualityInFinalFifth) {
    // Only epsilon-floor explorations may still violate the requirement late on.
    for (std::uint64_t seed = 42; seed < 47; ++seed) {
        const auto m = run_episode(small_config("icl", 2000), seed);
        std::size_t greedy_qp = 0;
        for (std::size_t i = 1600; i < m.steps.size(); ++i) {
            const auto& s = m.steps[i];
            if (s.task_type != TaskType::quality_preferred || s.explored) continue;
            ++greedy_qp;
            EXPECT_TRUE(s.quality_ok) << "seed " << seed << " step " << i;
        }
        EXPECT_GT(greedy_qp, 100u);
        EXPECT_GE(window_success_rate(m, 1600, 2000), 0.98) << "seed " << seed;
    }
}

TEST(RunEpisode, BruteforceDominatesEveryPolicyPerTask) {
    const auto bf = run_episode(small_config("bruteforce", 400), 13);
    for (const auto& name : policy_names()) {
        const auto other = run_episode(small_config(name, 400), 13);
        for (std::size_t i = 0; i < bf.steps.size(); ++i) {
            ASSERT_EQ(other.steps[i].task_id, bf.steps[i].task_id);
            EXPECT_GE(bf.steps[i].reward, other.steps[i].reward) << name << " step " << i;
        }
    }
}

TEST(Metrics, WindowsAndMovingAverage) {
    EpisodeMetrics m;
    for (std::size_t i = 0; i < 20; ++i) {
        StepRecord s;
        s.step = i;
        s.reward = static_cast<double>(i);
        s.task_type = i % 2 ? TaskType::quality_preferred : TaskType::regular;
        s.quality_ok = i < 10;
        m.steps.push_back(s);
    }
    summarize(m);
    EXPECT_DOUBLE_EQ(m.first_window_mean_reward, 0.5);
    EXPECT_DOUBLE_EQ(m.final_window_mean_reward, 18.5);
    EXPECT_DOUBLE_EQ(window_mean_reward(m, 0, 4), 1.5);
    EXPECT_DOUBLE_EQ(m.success_rate, 0.5);
    EXPECT_DOUBLE_EQ(window_success_rate(m, 10, 20), 0.0);
    EXPECT_DOUBLE_EQ(window_success_rate(m, 0, 1), 1.0);  // no quality-preferred task in range
    const auto ma = m.moving_average_reward(4);
    ASSERT_EQ(ma.size(), 20u);
    EXPECT_DOUBLE_EQ(ma[0], 0.0);
    EXPECT_DOUBLE_EQ(ma[3], 1.5);
    EXPECT_DOUBLE_EQ(ma[19], 17.5);
}

TEST(Csv, HeaderAndRoundTrip) {
    const auto m = run_episode(small_config("icl", 120), 4);
    const auto text = metrics_csv(m);
    EXPECT_TRUE(text.starts_with(
        "step,task_type,token_bin,decision,explored,delay_s,reward,quality_ok,cum_reward,success_rate\n"));
    const auto rows = parse_metrics_csv(text);
    ASSERT_EQ(rows.size(), m.steps.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto& s = m.steps[i];
        EXPECT_EQ(r.step, s.step);
        EXPECT_EQ(r.task_type, to_string(s.task_type));
        EXPECT_EQ(r.decision, to_string(s.decision));
        EXPECT_EQ(r.explored, s.explored);
        EXPECT_EQ(r.quality_ok, s.quality_ok);
        EXPECT_NEAR(r.reward, s.reward, 5e-7);
        EXPECT_NEAR(r.delay_s, s.delay_s, 5e-7);
        cum += r.reward;
        // cum_reward equals the running sum of the printed rewards up to rounding
        EXPECT_NEAR(r.cum_reward, cum, 1e-6 * static_cast<double>(i + 2));
    }
}

TEST(Csv, EmptyEpisodeIsHeaderOnly) {
    EpisodeMetrics m;
    summarize(m);
    const auto text = metrics_csv(m);
    EXPECT_EQ(text, "step,task_type,token_bin,decision,explored,delay_s,reward,quality_ok,cum_reward,success_rate\n");
    EXPECT_TRUE(parse_metrics_csv(text).empty());
}

TEST(Output, WriteMetricsProducesCsvAndSummary) {
    const auto dir = temp_dir("write");
    const auto cfg = small_config("bruteforce", 50);
    const auto m = run_episode(cfg, 2);
    write_metrics(m, cfg, dir / "bruteforce-seed2.csv");
    EXPECT_EQ(read_file(dir / "bruteforce-seed2.csv"), metrics_csv(m));
    const auto summary = json::parse(read_file(dir / "bruteforce-seed2.json"));
    EXPECT_EQ(summary["policy"], "bruteforce");
    EXPECT_EQ(summary["seed"], 2);
    EXPECT_NEAR(summary["aggregates"]["mean_reward"].get<double>(), m.mean_reward, 1e-9);
    EXPECT_NEAR(summary["aggregates"]["success_rate"].get<double>(), m.success_rate, 1e-12);
    EXPECT_TRUE(summary.contains("config"));
    std::filesystem::remove_all(dir);
}

TEST(Replications, SeedsAndParallelDeterminism) {
    auto cfg = small_config("q_learning", 100);
    cfg.replications = 3;
    cfg.seed = 10;
    const auto runs = run_replications(cfg);
    ASSERT_EQ(runs.size(), 3u);
    for (int r = 0; r < 3; ++r) {
        EXPECT_EQ(runs[r].seed, 10u + r);
        EXPECT_EQ(metrics_csv(runs[r]), metrics_csv(run_episode(cfg, 10 + r)));
    }
}

TEST(ParallelFor, CoversAllIndicesAndRethrows) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                     if (i == 7) throw InvalidInput("seven");
                 }),
                 InvalidInput);
}

TEST(Sweep, AxisParsingAndValues) {
    EXPECT_EQ(parse_sweep_axis("prompt_token_mean"), SweepAxis::prompt_token_mean);
    EXPECT_EQ(parse_sweep_axis("quality_task_fraction"), SweepAxis::quality_task_fraction);
    EXPECT_EQ(parse_sweep_axis("profile_pair"), SweepAxis::profile_pair);
    EXPECT_THROW(parse_sweep_axis("bandwidth"), InvalidInput);

    const ExperimentConfig base;
    EXPECT_EQ(apply_sweep_value(base, SweepAxis::prompt_token_mean, "750").workload.mean_tokens, 750.0);
    const auto pair = apply_sweep_value(base, SweepAxis::profile_pair, "gemma-7b+gemini-1.5-pro");
    EXPECT_EQ(pair.edge_profile, "gemma-7b");
    EXPECT_EQ(pair.cloud_profile, "gemini-1.5-pro");
    EXPECT_THROW(apply_sweep_value(base, SweepAxis::prompt_token_mean, "lots"), InvalidInput);
    EXPECT_THROW(apply_sweep_value(base, SweepAxis::profile_pair, "gemma-7b"), InvalidInput);
}

TEST(Sweep, FractionExtremesMatchStaticPolicies) {
    auto cfg = small_config("bruteforce", 200);
    cfg.replications = 2;
    const auto rows = run_sweep(cfg, SweepAxis::quality_task_fraction, {"0", "1"});
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) {
        auto point = apply_sweep_value(cfg, SweepAxis::quality_task_fraction, row.value);
        point.policy.name = row.value == "0" ? "always_local" : "always_offload";
        const auto ref = run_episode(point, row.seed);
        EXPECT_NEAR(row.mean_delay_s, ref.mean_delay_s, 1e-12) << row.value;
        EXPECT_NEAR(row.mean_reward, ref.mean_reward, 1e-12) << row.value;
        EXPECT_EQ(row.success_rate, 1.0);
    }
}

TEST(Sweep, MeanDelayGrowsWithPromptSize) {
    auto cfg = small_config("bruteforce", 200);
    cfg.replications = 1;
    const auto rows = run_sweep(cfg, SweepAxis::prompt_token_mean, {"400", "800", "1200", "1600"});
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].mean_delay_s, rows[i - 1].mean_delay_s);
    const auto csv = sweep_csv(rows);
    EXPECT_TRUE(csv.starts_with("value,replication,seed,mean_delay_s,mean_reward,success_rate\n"));
}

TEST(Profiles, ConfiguredLibraryFile) {
    auto cfg = small_config("bruteforce", 10);
    cfg.profile_library = std::filesystem::path(EDGEGEN_SOURCE_DIR) / "data" / "profiles.json";
    EXPECT_EQ(load_profiles(cfg).names(), ProfileLibrary::builtin().names());
    cfg.edge_profile = "missing";
    EXPECT_THROW(run_episode(cfg, 1), ConfigError);
}

// Serves chat completions by applying the mock rule to the prompt it receives.
TEST(RemoteRoundTrip, RemoteRunReplaysAndMatchesMock) {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
        const auto prompt = json::parse(req.body)["messages"][0]["content"].get<std::string>();
        const auto parsed = parse_meta_prompt(prompt);
        const auto reply = std::string(to_string(mock_decision(parsed.examples, parsed.query)));
        json body = {{"choices", json::array({json{{"message", {{"role", "assistant"}, {"content", reply}}}}})}};
        res.set_content(body.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto dir = temp_dir("remote");
    auto cfg = small_config("icl", 150);
    cfg.replications = 1;
    cfg.oracle = OracleKind::remote;
    cfg.endpoint.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    cfg.endpoint.api_key_env_var = "";
    cfg.endpoint.transcript_path = dir / "transcript.jsonl";
    const auto remote = metrics_csv(run_episode(cfg, 8));
    server.stop();
    th.join();

    auto mock_cfg = small_config("icl", 150);
    EXPECT_EQ(remote, metrics_csv(run_episode(mock_cfg, 8)));

    auto replay_cfg = mock_cfg;
    replay_cfg.oracle = OracleKind::replay;
    replay_cfg.replay_transcript = dir / "transcript.jsonl";
    EXPECT_EQ(remote, metrics_csv(run_episode(replay_cfg, 8)));
    EXPECT_EQ(load_transcript(dir / "transcript.jsonl").size(), 150u);
    std::filesystem::remove_all(dir);
}
