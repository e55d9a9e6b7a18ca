#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "edgegen/delay.hpp"
#include "edgegen/icl.hpp"
#include "edgegen/llm_client.hpp"
#include "edgegen/objective.hpp"
#include "edgegen/policies.hpp"
#include "edgegen/radio.hpp"
#include "edgegen/workload.hpp"

namespace edgegen {

enum class OracleKind { mock, remote, replay };

struct PolicyConfig {
    // icl | icl_latest | icl_no_explore | q_learning | bruteforce |
    // always_local | always_offload | uniform_random
    std::string name = "icl";
    EpsilonSchedule epsilon;
    std::size_t latest_window = 10;
    double learning_rate = 0.1;
    std::int64_t bin_width = 200;
    int oracle_attempts = 3;
};

const std::vector<std::string>& policy_names();

struct ExperimentConfig {
    RadioConfig radio;
    DelayConfig delay;
    WorkloadConfig workload;
    RewardConfig reward;
    PolicyConfig policy;

    OracleKind oracle = OracleKind::mock;
    OracleEndpointConfig endpoint;
    std::filesystem::path replay_transcript;

    std::string edge_profile = "llama3-8b";
    std::string cloud_profile = "gpt-class-cloud";
    TimingInterpretation timing = TimingInterpretation::per_token;
    std::filesystem::path profile_library;  // empty: built-in profiles
    std::filesystem::path prompt_template;  // empty: standard template

    std::size_t steps = 2000;
    int replications = 5;
    std::uint64_t seed = 42;
    std::size_t moving_average_window = 25;

    void validate() const;
};

// JSON config. Every key is optional; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string to_json_text(const ExperimentConfig& cfg);

ProfileLibrary load_profiles(const ExperimentConfig& cfg);

struct StepRecord {
    std::size_t step = 0;
    UserId user_id = 0;
    std::size_t task_id = 0;
    TaskType task_type = TaskType::regular;
    std::int64_t n_tokens = 0;
    std::int64_t token_bin = 0;
    Decision decision = Decision::local;
    bool explored = false;
    double capacity_bps = 0.0;
    double delay_s = 0.0;
    double reward = 0.0;
    bool quality_ok = true;
    double cum_reward = 0.0;
    double success_rate = 1.0;  // running, over quality-preferred tasks so far
};

struct EpisodeMetrics {
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;

    double cumulative_reward = 0.0;
    double mean_reward = 0.0;
    double mean_delay_s = 0.0;
    double total_delay_s = 0.0;
    // Quality-preferred tasks served with quality_ok / all quality-preferred
    // tasks; 1 when there were none.
    double success_rate = 1.0;
    std::size_t quality_tasks = 0;
    double first_window_mean_reward = 0.0;  // first 10% of steps
    double final_window_mean_reward = 0.0;  // last 10% of steps

    std::vector<double> moving_average_reward(std::size_t window) const;
};

// Fills the aggregate fields and the running columns from steps.
void summarize(EpisodeMetrics& m);

// Mean of field over steps [first, last).
double window_mean_reward(const EpisodeMetrics& m, std::size_t first, std::size_t last);
double window_success_rate(const EpisodeMetrics& m, std::size_t first, std::size_t last);

using OracleFactory =
    std::function<std::unique_ptr<DecisionOracle>(const ExperimentConfig& cfg, std::uint64_t seed)>;

std::unique_ptr<DecisionOracle> make_oracle(const ExperimentConfig& cfg, std::uint64_t seed);
std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg, std::uint64_t seed, const OracleFactory& oracles);

// One episode of cfg.steps decisions. Deterministic in (cfg, seed) whenever
// the oracle is.
EpisodeMetrics run_episode(const ExperimentConfig& cfg, std::uint64_t seed, const OracleFactory& oracles = {});
inline EpisodeMetrics run_episode(const ExperimentConfig& cfg) { return run_episode(cfg, cfg.seed); }

// cfg.replications episodes with seeds cfg.seed, cfg.seed + 1, ... run in parallel.
std::vector<EpisodeMetrics> run_replications(const ExperimentConfig& cfg, const OracleFactory& oracles = {});

enum class SweepAxis { prompt_token_mean, quality_task_fraction, profile_pair };

SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis) noexcept;

struct SweepRow {
    std::string value;
    int replication = 0;
    std::uint64_t seed = 0;
    double mean_delay_s = 0.0;
    double mean_reward = 0.0;
    double success_rate = 1.0;
};

// Applies one sweep value to a copy of base. profile_pair values read
// "edge_name+cloud_name".
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepAxis axis, const std::string& value);

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<std::string>& values,
                                const OracleFactory& oracles = {});

std::string metrics_csv(const EpisodeMetrics& m);
std::string summary_json(const EpisodeMetrics& m, const ExperimentConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Writes <csv_path> and <csv_path stem>.json next to it.
void write_metrics(const EpisodeMetrics& m, const ExperimentConfig& cfg, const std::filesystem::path& csv_path);
void write_text(const std::filesystem::path& path, const std::string& text);

struct CsvRow {
    std::size_t step = 0;
    std::string task_type;
    std::int64_t token_bin = 0;
    std::string decision;
    bool explored = false;
    double delay_s = 0.0;
    double reward = 0.0;
    bool quality_ok = true;
    double cum_reward = 0.0;
    double success_rate = 0.0;
};
std::vector<CsvRow> parse_metrics_csv(const std::string& text);

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads; rethrows
// the first exception.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace edgegen
