#include "edgegen/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace edgegen {

namespace {

using nlohmann::json;

// Reads known keys of one config section and rejects the rest.
class Section {
public:
    Section(const json& node, std::string name) : node_(node), name_(std::move(name)) {
        if (!node_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
    }

    template <typename T>
    void read(const char* key, T& field) {
        seen_.insert(key);
        if (!node_.contains(key)) return;
        const auto& value = node_.at(key);
        if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
            if (!value.is_number_unsigned()) throw ConfigError("config " + qualified(key) + " must be a non-negative integer");
        }
        try {
            field = value.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("config " + qualified(key) + ": " + e.what());
        }
    }

    template <typename T, typename Parse>
    void read_as(const char* key, T& field, Parse parse) {
        std::string text;
        read(key, text);
        if (text.empty()) return;
        try {
            field = parse(text);
        } catch (const InvalidInput& e) {
            throw ConfigError("config " + qualified(key) + ": " + e.what());
        }
    }

    void read_path(const char* key, std::filesystem::path& field) {
        std::string text;
        read(key, text);
        if (!text.empty()) field = text;
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) throw ConfigError("unknown config key '" + qualified(key) + "'");
        }
    }

private:
    std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

    const json& node_;
    std::string name_;
    std::set<std::string> seen_;
};

json section_or_empty(const json& doc, const char* key) {
    return doc.contains(key) ? doc.at(key) : json::object();
}

OracleKind parse_oracle_kind(const std::string& text) {
    if (text == "mock") return OracleKind::mock;
    if (text == "remote") return OracleKind::remote;
    if (text == "replay") return OracleKind::replay;
    throw InvalidInput("unknown oracle kind '" + text + "'");
}

std::string_view to_string(OracleKind k) {
    switch (k) {
        case OracleKind::mock:
            return "mock";
        case OracleKind::remote:
            return "remote";
        case OracleKind::replay:
            return "replay";
    }
    return "mock";
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

template <typename Fn>
auto with_step_context(std::size_t step, Fn&& fn) -> decltype(fn()) {
    const auto ctx = [step](const char* what) { return "step " + std::to_string(step) + ": " + what; };
    try {
        return fn();
    } catch (const UnservableLink& e) {
        throw UnservableLink(ctx(e.what()));
    } catch (const OracleProtocolError& e) {
        throw OracleProtocolError(ctx(e.what()));
    } catch (const TransportError& e) {
        throw TransportError(ctx(e.what()));
    }
}

std::size_t window_len(std::size_t n) { return n == 0 ? 0 : std::max<std::size_t>(1, (n + 9) / 10); }

}  // namespace

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names = {"icl",        "icl_latest",   "icl_no_explore", "q_learning",
                                                   "bruteforce", "always_local", "always_offload", "uniform_random"};
    return names;
}

void ExperimentConfig::validate() const {
    radio.validate();
    delay.validate();
    workload.validate();
    reward.validate();
    policy.epsilon.validate();
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (moving_average_window < 1) throw ConfigError("moving_average_window must be >= 1");
    if (policy.bin_width < 1) throw ConfigError("policy.bin_width must be >= 1");
    if (policy.latest_window < 1) throw ConfigError("policy.latest_window must be >= 1");
    if (policy.oracle_attempts < 1) throw ConfigError("policy.oracle_attempts must be >= 1");
    if (!(policy.learning_rate > 0.0 && policy.learning_rate <= 1.0)) {
        throw ConfigError("policy.learning_rate must be in (0, 1]");
    }
    const auto& names = policy_names();
    if (std::find(names.begin(), names.end(), policy.name) == names.end()) {
        throw ConfigError("unknown policy '" + policy.name + "'");
    }
    if (oracle == OracleKind::remote) endpoint.validate();
    if (oracle == OracleKind::replay && replay_transcript.empty()) {
        throw ConfigError("oracle 'replay' needs replay_transcript");
    }
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig cfg;
    Section top(doc, "");
    top.read("steps", cfg.steps);
    top.read("replications", cfg.replications);
    top.read("seed", cfg.seed);
    top.read("moving_average_window", cfg.moving_average_window);
    top.read("edge_profile", cfg.edge_profile);
    top.read("cloud_profile", cfg.cloud_profile);
    top.read_as("timing_interpretation", cfg.timing, parse_timing_interpretation);
    top.read_path("profile_library", cfg.profile_library);
    top.read_path("prompt_template", cfg.prompt_template);
    top.read_as("oracle", cfg.oracle, parse_oracle_kind);
    top.read_path("replay_transcript", cfg.replay_transcript);
    for (const char* key : {"radio", "delay", "workload", "reward", "policy", "endpoint"}) {
        json ignored;
        top.read(key, ignored);
    }
    top.finish();

    const auto radio_node = section_or_empty(doc, "radio");
    Section radio(radio_node, "radio");
    radio.read("rb_count", cfg.radio.rb_count);
    radio.read("rb_bandwidth_hz", cfg.radio.rb_bandwidth_hz);
    radio.read("bs_tx_power_dbm_per_rb", cfg.radio.bs_tx_power_dbm_per_rb);
    radio.read("noise_density_dbm_hz", cfg.radio.noise_density_dbm_hz);
    radio.read("intercell_interference_w", cfg.radio.intercell_interference_w);
    radio.read("pathloss_ref_db", cfg.radio.pathloss_ref_db);
    radio.read("pathloss_exp_coeff", cfg.radio.pathloss_exp_coeff);
    radio.read("shadowing_sigma_db", cfg.radio.shadowing_sigma_db);
    radio.read("pf_window_slots", cfg.radio.pf_window_slots);
    radio.read("pf_rate_floor_bps", cfg.radio.pf_rate_floor_bps);
    radio.read("pf_warmup_slots", cfg.radio.pf_warmup_slots);
    radio.finish();

    const auto delay_node = section_or_empty(doc, "delay");
    Section delay(delay_node, "delay");
    delay.read("token_size_bytes", cfg.delay.token_size_bytes);
    delay.read("backhaul_s", cfg.delay.backhaul_s);
    delay.finish();

    const auto workload_node = section_or_empty(doc, "workload");
    Section wl(workload_node, "workload");
    wl.read("n_users", cfg.workload.n_users);
    wl.read("requests_per_user", cfg.workload.requests_per_user);
    wl.read("mean_tokens", cfg.workload.mean_tokens);
    wl.read("token_sd", cfg.workload.token_sd);
    wl.read("token_min", cfg.workload.token_min);
    wl.read("token_max", cfg.workload.token_max);
    wl.read("quality_task_fraction", cfg.workload.quality_task_fraction);
    wl.read("cell_radius_m", cfg.workload.cell_radius_m);
    wl.read("min_distance_m", cfg.workload.min_distance_m);
    wl.read("regular_quality_req", cfg.workload.regular_quality_req);
    wl.read("preferred_quality_req", cfg.workload.preferred_quality_req);
    wl.finish();

    const auto reward_node = section_or_empty(doc, "reward");
    Section rw(reward_node, "reward");
    rw.read("target_delay_s", cfg.reward.target_delay_s);
    rw.read("penalty", cfg.reward.penalty);
    rw.finish();

    const auto policy_node = section_or_empty(doc, "policy");
    Section pol(policy_node, "policy");
    pol.read("name", cfg.policy.name);
    pol.read("epsilon_start", cfg.policy.epsilon.start);
    pol.read("epsilon_decay", cfg.policy.epsilon.decay);
    pol.read("epsilon_floor", cfg.policy.epsilon.floor);
    pol.read("latest_window", cfg.policy.latest_window);
    pol.read("learning_rate", cfg.policy.learning_rate);
    pol.read("bin_width", cfg.policy.bin_width);
    pol.read("oracle_attempts", cfg.policy.oracle_attempts);
    pol.finish();

    const auto endpoint_node = section_or_empty(doc, "endpoint");
    Section ep(endpoint_node, "endpoint");
    ep.read("base_url", cfg.endpoint.base_url);
    ep.read("model_name", cfg.endpoint.model_name);
    ep.read("api_key_env_var", cfg.endpoint.api_key_env_var);
    ep.read("timeout_s", cfg.endpoint.timeout_s);
    ep.read("max_retries", cfg.endpoint.max_retries);
    ep.read("temperature", cfg.endpoint.temperature);
    ep.read("backoff_initial_s", cfg.endpoint.backoff_initial_s);
    ep.read_path("transcript_path", cfg.endpoint.transcript_path);
    ep.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return experiment_config_from_json(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["steps"] = cfg.steps;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    j["moving_average_window"] = cfg.moving_average_window;
    j["edge_profile"] = cfg.edge_profile;
    j["cloud_profile"] = cfg.cloud_profile;
    j["timing_interpretation"] = std::string(to_string(cfg.timing));
    j["profile_library"] = cfg.profile_library.string();
    j["prompt_template"] = cfg.prompt_template.string();
    j["oracle"] = std::string(to_string(cfg.oracle));
    j["replay_transcript"] = cfg.replay_transcript.string();
    j["radio"] = {{"rb_count", cfg.radio.rb_count},
                  {"rb_bandwidth_hz", cfg.radio.rb_bandwidth_hz},
                  {"bs_tx_power_dbm_per_rb", cfg.radio.bs_tx_power_dbm_per_rb},
                  {"noise_density_dbm_hz", cfg.radio.noise_density_dbm_hz},
                  {"intercell_interference_w", cfg.radio.intercell_interference_w},
                  {"pathloss_ref_db", cfg.radio.pathloss_ref_db},
                  {"pathloss_exp_coeff", cfg.radio.pathloss_exp_coeff},
                  {"shadowing_sigma_db", cfg.radio.shadowing_sigma_db},
                  {"pf_window_slots", cfg.radio.pf_window_slots},
                  {"pf_rate_floor_bps", cfg.radio.pf_rate_floor_bps},
                  {"pf_warmup_slots", cfg.radio.pf_warmup_slots}};
    j["delay"] = {{"token_size_bytes", cfg.delay.token_size_bytes}, {"backhaul_s", cfg.delay.backhaul_s}};
    j["workload"] = {{"n_users", cfg.workload.n_users},
                     {"requests_per_user", cfg.workload.requests_per_user},
                     {"mean_tokens", cfg.workload.mean_tokens},
                     {"token_sd", cfg.workload.token_sd},
                     {"token_min", cfg.workload.token_min},
                     {"token_max", cfg.workload.token_max},
                     {"quality_task_fraction", cfg.workload.quality_task_fraction},
                     {"cell_radius_m", cfg.workload.cell_radius_m},
                     {"min_distance_m", cfg.workload.min_distance_m},
                     {"regular_quality_req", cfg.workload.regular_quality_req},
                     {"preferred_quality_req", cfg.workload.preferred_quality_req}};
    j["reward"] = {{"target_delay_s", cfg.reward.target_delay_s}, {"penalty", cfg.reward.penalty}};
    j["policy"] = {{"name", cfg.policy.name},
                   {"epsilon_start", cfg.policy.epsilon.start},
                   {"epsilon_decay", cfg.policy.epsilon.decay},
                   {"epsilon_floor", cfg.policy.epsilon.floor},
                   {"latest_window", cfg.policy.latest_window},
                   {"learning_rate", cfg.policy.learning_rate},
                   {"bin_width", cfg.policy.bin_width},
                   {"oracle_attempts", cfg.policy.oracle_attempts}};
    // The credential itself never appears here, only the variable name.
    j["endpoint"] = {{"base_url", cfg.endpoint.base_url},
                     {"model_name", cfg.endpoint.model_name},
                     {"api_key_env_var", cfg.endpoint.api_key_env_var},
                     {"timeout_s", cfg.endpoint.timeout_s},
                     {"max_retries", cfg.endpoint.max_retries},
                     {"temperature", cfg.endpoint.temperature},
                     {"backoff_initial_s", cfg.endpoint.backoff_initial_s},
                     {"transcript_path", cfg.endpoint.transcript_path.string()}};
    return j.dump(2);
}

ProfileLibrary load_profiles(const ExperimentConfig& cfg) {
    return cfg.profile_library.empty() ? ProfileLibrary::builtin() : ProfileLibrary::load(cfg.profile_library);
}

std::vector<double> EpisodeMetrics::moving_average_reward(std::size_t window) const {
    if (window < 1) throw InvalidInput("moving average window must be >= 1");
    std::vector<double> out;
    out.reserve(steps.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        sum += steps[i].reward;
        if (i >= window) sum -= steps[i - window].reward;
        out.push_back(sum / static_cast<double>(std::min(i + 1, window)));
    }
    return out;
}

double window_mean_reward(const EpisodeMetrics& m, std::size_t first, std::size_t last) {
    last = std::min(last, m.steps.size());
    if (first >= last) return 0.0;
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += m.steps[i].reward;
    return sum / static_cast<double>(last - first);
}

double window_success_rate(const EpisodeMetrics& m, std::size_t first, std::size_t last) {
    last = std::min(last, m.steps.size());
    std::size_t total = 0;
    std::size_t ok = 0;
    for (std::size_t i = first; i < last; ++i) {
        if (m.steps[i].task_type != TaskType::quality_preferred) continue;
        ++total;
        if (m.steps[i].quality_ok) ++ok;
    }
    return total == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(total);
}

void summarize(EpisodeMetrics& m) {
    double cum = 0.0;
    double delay = 0.0;
    std::size_t quality_tasks = 0;
    std::size_t quality_ok = 0;
    std::vector<StepOutcome> outcomes;
    outcomes.reserve(m.steps.size());
    for (auto& s : m.steps) {
        cum += s.reward;
        delay += s.delay_s;
        if (s.task_type == TaskType::quality_preferred) {
            ++quality_tasks;
            if (s.quality_ok) ++quality_ok;
        }
        s.cum_reward = cum;
        s.success_rate =
            quality_tasks == 0 ? 1.0 : static_cast<double>(quality_ok) / static_cast<double>(quality_tasks);
        outcomes.push_back(StepOutcome{s.task_id, s.decision, s.delay_s, s.quality_ok, s.reward});
    }
    const auto n = m.steps.size();
    m.cumulative_reward = cum;
    m.mean_reward = n == 0 ? 0.0 : cum / static_cast<double>(n);
    m.total_delay_s = episode_objective(outcomes);
    m.mean_delay_s = n == 0 ? 0.0 : delay / static_cast<double>(n);
    m.quality_tasks = quality_tasks;
    m.success_rate =
        quality_tasks == 0 ? 1.0 : static_cast<double>(quality_ok) / static_cast<double>(quality_tasks);
    const auto w = window_len(n);
    m.first_window_mean_reward = window_mean_reward(m, 0, w);
    m.final_window_mean_reward = window_mean_reward(m, n - w, n);
}

std::unique_ptr<DecisionOracle> make_oracle(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.oracle) {
        case OracleKind::mock:
            return std::make_unique<MockOracle>();
        case OracleKind::remote: {
            auto endpoint = cfg.endpoint;
            if (!endpoint.transcript_path.empty() && cfg.replications > 1) {
                auto p = endpoint.transcript_path;
                endpoint.transcript_path =
                    p.replace_filename(p.stem().string() + "-seed" + std::to_string(seed) + p.extension().string());
            }
            return std::make_unique<RemoteOracle>(endpoint);
        }
        case OracleKind::replay:
            return std::make_unique<TranscriptReplayOracle>(TranscriptReplayOracle::load(cfg.replay_transcript));
    }
    throw ConfigError("unsupported oracle kind");
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg, std::uint64_t seed, const OracleFactory& oracles) {
    auto rng = make_stream(seed, streams::policy);
    const auto& name = cfg.policy.name;
    if (name == "icl" || name == "icl_latest" || name == "icl_no_explore") {
        IclAgentConfig agent;
        agent.replay = name == "icl_latest" ? ReplayMode::latest : ReplayMode::prioritized;
        agent.latest_window = cfg.policy.latest_window;
        agent.explore = name != "icl_no_explore";
        agent.epsilon = cfg.policy.epsilon;
        agent.bin_width = cfg.policy.bin_width;
        agent.oracle_attempts = cfg.policy.oracle_attempts;
        auto oracle = oracles ? oracles(cfg, seed) : make_oracle(cfg, seed);
        auto tmpl = cfg.prompt_template.empty() ? PromptTemplate::standard() : PromptTemplate::load(cfg.prompt_template);
        return std::make_unique<IclAgent>(std::move(oracle), agent, std::move(rng), std::move(tmpl));
    }
    if (name == "q_learning") {
        QLearningConfig q;
        q.learning_rate = cfg.policy.learning_rate;
        q.epsilon = cfg.policy.epsilon;
        q.bin_width = cfg.policy.bin_width;
        return std::make_unique<QLearningPolicy>(q, std::move(rng));
    }
    if (name == "bruteforce") return std::make_unique<BruteforcePolicy>();
    if (name == "always_local") return std::make_unique<StaticPolicy>(StaticKind::always_local, std::move(rng));
    if (name == "always_offload") return std::make_unique<StaticPolicy>(StaticKind::always_offload, std::move(rng));
    if (name == "uniform_random") return std::make_unique<StaticPolicy>(StaticKind::uniform_random, std::move(rng));
    throw ConfigError("unknown policy '" + name + "'");
}

EpisodeMetrics run_episode(const ExperimentConfig& cfg, std::uint64_t seed, const OracleFactory& oracles) {
    cfg.validate();
    const auto library = load_profiles(cfg);
    const auto edge = library.resolve(cfg.edge_profile, cfg.timing);
    const auto cloud = library.resolve(cfg.cloud_profile, cfg.timing);

    auto placement_rng = make_stream(seed, streams::placement);
    auto task_rng = make_stream(seed, streams::tasks);

    auto users = generate_users(cfg.workload, cfg.radio, placement_rng);
    for (int slot = 0; slot < cfg.radio.pf_warmup_slots; ++slot) allocate_proportional_fair(users, cfg.radio);

    auto policy = make_policy(cfg, seed, oracles);

    EpisodeMetrics metrics;
    metrics.policy = policy->name();
    metrics.seed = seed;
    metrics.steps.reserve(cfg.steps);

    std::vector<TaskRequest> stream;
    std::size_t cursor = 0;
    std::size_t next_task_id = 0;

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        if (cursor == stream.size()) {
            stream = interleave_round_robin(generate_tasks(cfg.workload, task_rng, next_task_id), cfg.workload.n_users);
            next_task_id += stream.size();
            cursor = 0;
        }
        const auto& task = stream[cursor++];

        allocate_proportional_fair(users, cfg.radio);
        const double capacity = users[task.user_id].avg_rate_ewma;

        StepContext ctx;
        ctx.step = step;
        ctx.task = &task;
        ctx.condition = Condition{task.task_type, bin_tokens(task.n_tokens, cfg.policy.bin_width)};
        ctx.capacity_bps = capacity;
        ctx.edge = &edge;
        ctx.cloud = &cloud;
        ctx.delay = &cfg.delay;
        ctx.reward = &cfg.reward;

        const auto choice = with_step_context(step, [&] { return policy->choose(ctx); });
        const double delay = with_step_context(
            step, [&] { return total_task_delay(task, edge, cloud, choice.decision, capacity, cfg.delay); });
        const auto outcome = step_reward(task, choice.decision, delay, edge, cloud, cfg.reward);
        policy->observe(ctx, outcome);

        StepRecord rec;
        rec.step = step;
        rec.user_id = task.user_id;
        rec.task_id = task.task_id;
        rec.task_type = task.task_type;
        rec.n_tokens = task.n_tokens;
        rec.token_bin = ctx.condition.token_bin;
        rec.decision = choice.decision;
        rec.explored = choice.explored;
        rec.capacity_bps = capacity;
        rec.delay_s = outcome.delay_s;
        rec.reward = outcome.reward;
        rec.quality_ok = outcome.quality_ok;
        metrics.steps.push_back(rec);
    }
    summarize(metrics);
    return metrics;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const auto workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<EpisodeMetrics> run_replications(const ExperimentConfig& cfg, const OracleFactory& oracles) {
    cfg.validate();
    std::vector<EpisodeMetrics> out(static_cast<std::size_t>(cfg.replications));
    parallel_for(out.size(), [&](std::size_t r) { out[r] = run_episode(cfg, cfg.seed + r, oracles); });
    return out;
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "prompt_token_mean") return SweepAxis::prompt_token_mean;
    if (text == "quality_task_fraction") return SweepAxis::quality_task_fraction;
    if (text == "profile_pair") return SweepAxis::profile_pair;
    throw InvalidInput("unknown sweep axis '" + std::string(text) + "'");
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::prompt_token_mean:
            return "prompt_token_mean";
        case SweepAxis::quality_task_fraction:
            return "quality_task_fraction";
        case SweepAxis::profile_pair:
            return "profile_pair";
    }
    return "";
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepAxis axis, const std::string& value) {
    ExperimentConfig cfg = base;
    auto as_number = [&value]() {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size()) throw InvalidInput("sweep value '" + value + "' is not a number");
        return v;
    };
    switch (axis) {
        case SweepAxis::prompt_token_mean:
            cfg.workload.mean_tokens = as_number();
            break;
        case SweepAxis::quality_task_fraction:
            cfg.workload.quality_task_fraction = as_number();
            break;
        case SweepAxis::profile_pair: {
            const auto plus = value.find('+');
            if (plus == std::string::npos || plus == 0 || plus + 1 == value.size()) {
                throw InvalidInput("profile_pair value must read edge+cloud, got '" + value + "'");
            }
            cfg.edge_profile = value.substr(0, plus);
            cfg.cloud_profile = value.substr(plus + 1);
            break;
        }
    }
    cfg.validate();
    return cfg;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<std::string>& values,
                                const OracleFactory& oracles) {
    if (values.empty()) throw InvalidInput("run_sweep: no values");
    std::vector<ExperimentConfig> configs;
    configs.reserve(values.size());
    for (const auto& v : values) configs.push_back(apply_sweep_value(base, axis, v));

    const auto reps = static_cast<std::size_t>(base.replications);
    std::vector<SweepRow> rows(values.size() * reps);
    parallel_for(rows.size(), [&](std::size_t i) {
        const auto point = i / reps;
        const auto rep = i % reps;
        const auto seed = base.seed + rep;
        const auto m = run_episode(configs[point], seed, oracles);
        rows[i] = SweepRow{values[point], static_cast<int>(rep), seed, m.mean_delay_s, m.mean_reward, m.success_rate};
    });
    return rows;
}

std::string metrics_csv(const EpisodeMetrics& m) {
    std::string out = "step,task_type,token_bin,decision,explored,delay_s,reward,quality_ok,cum_reward,success_rate\n";
    for (const auto& s : m.steps) {
        out += std::to_string(s.step);
        out += ',';
        out += to_string(s.task_type);
        out += ',';
        out += std::to_string(s.token_bin);
        out += ',';
        out += to_string(s.decision);
        out += s.explored ? ",1," : ",0,";
        out += fixed6(s.delay_s);
        out += ',';
        out += fixed6(s.reward);
        out += s.quality_ok ? ",1," : ",0,";
        out += fixed6(s.cum_reward);
        out += ',';
        out += fixed6(s.success_rate);
        out += '\n';
    }
    return out;
}

std::string summary_json(const EpisodeMetrics& m, const ExperimentConfig& cfg) {
    json j;
    j["config"] = json::parse(to_json_text(cfg));
    j["seed"] = m.seed;
    j["policy"] = m.policy;
    j["aggregates"] = {{"steps", m.steps.size()},
                       {"cumulative_reward", m.cumulative_reward},
                       {"mean_reward", m.mean_reward},
                       {"mean_delay_s", m.mean_delay_s},
                       {"total_delay_s", m.total_delay_s},
                       {"success_rate", m.success_rate},
                       {"quality_tasks", m.quality_tasks},
                       {"first_window_mean_reward", m.first_window_mean_reward},
                       {"final_window_mean_reward", m.final_window_mean_reward},
                       {"moving_average_window", cfg.moving_average_window},
                       {"final_moving_average_reward",
                        m.steps.empty() ? 0.0 : m.moving_average_reward(cfg.moving_average_window).back()}};
    return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "value,replication,seed,mean_delay_s,mean_reward,success_rate\n";
    for (const auto& r : rows) {
        out += r.value + "," + std::to_string(r.replication) + "," + std::to_string(r.seed) + "," +
               fixed6(r.mean_delay_s) + "," + fixed6(r.mean_reward) + "," + fixed6(r.success_rate) + "\n";
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_metrics(const EpisodeMetrics& m, const ExperimentConfig& cfg, const std::filesystem::path& csv_path) {
    write_text(csv_path, metrics_csv(m));
    auto json_path = csv_path;
    json_path.replace_extension(".json");
    write_text(json_path, summary_json(m, cfg));
}

std::vector<CsvRow> parse_metrics_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("metrics CSV is empty");
    if (line != "step,task_type,token_bin,decision,explored,delay_s,reward,quality_ok,cum_reward,success_rate") {
        throw InvalidInput("unexpected metrics CSV header: " + line);
    }
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 10) throw InvalidInput("metrics CSV row has " + std::to_string(f.size()) + " fields");
        CsvRow r;
        r.step = std::stoull(f[0]);
        r.task_type = f[1];
        r.token_bin = std::stoll(f[2]);
        r.decision = f[3];
        r.explored = f[4] == "1";
        r.delay_s = std::stod(f[5]);
        r.reward = std::stod(f[6]);
        r.quality_ok = f[7] == "1";
        r.cum_reward = std::stod(f[8]);
        r.success_rate = std::stod(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace edgegen
