// edgegen: run offloading experiments from a JSON config.
//
//   edgegen run --config cfg.json [--seed N] [--out DIR]
//   edgegen sweep --config cfg.json --axis quality_task_fraction --values 0,0.5,1 [--out DIR]
//   edgegen compare --configs a.json b.json [--out DIR]
//   edgegen profiles list [--library profiles.json]

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "edgegen/runner.hpp"

namespace {

using namespace edgegen;

std::vector<std::string> split_values(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void print_summary(const EpisodeMetrics& m) {
    std::printf("%-16s seed=%-6llu steps=%-6zu mean_reward=%10.4f mean_delay_s=%9.4f success_rate=%.4f "
                "final_window_reward=%10.4f\n",
                m.policy.c_str(), static_cast<unsigned long long>(m.seed), m.steps.size(), m.mean_reward,
                m.mean_delay_s, m.success_rate, m.final_window_mean_reward);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
    auto cfg = load_experiment_config(config_path);
    if (seed) cfg.seed = *seed;
    const auto runs = run_replications(cfg);
    const std::filesystem::path out(out_dir);
    for (const auto& m : runs) {
        print_summary(m);
        write_metrics(m, cfg, out / (m.policy + "-seed" + std::to_string(m.seed) + ".csv"));
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name, const std::string& values,
              const std::string& out_dir) {
    const auto cfg = load_experiment_config(config_path);
    const auto axis = parse_sweep_axis(axis_name);
    const auto rows = run_sweep(cfg, axis, split_values(values));
    const auto table = sweep_csv(rows);
    std::cout << table;
    write_text(std::filesystem::path(out_dir) / ("sweep-" + axis_name + ".csv"), table);
    return 0;
}

int cmd_compare(const std::vector<std::string>& configs, const std::string& out_dir) {
    std::string table = "config,policy,seed,mean_delay_s,mean_reward,success_rate,final_window_mean_reward\n";
    for (const auto& path : configs) {
        const auto cfg = load_experiment_config(path);
        for (const auto& m : run_replications(cfg)) {
            char buf[256];
            std::snprintf(buf, sizeof buf, ",%s,%llu,%.6f,%.6f,%.6f,%.6f\n", m.policy.c_str(),
                          static_cast<unsigned long long>(m.seed), m.mean_delay_s, m.mean_reward, m.success_rate,
                          m.final_window_mean_reward);
            table += path + buf;
        }
    }
    std::cout << table;
    write_text(std::filesystem::path(out_dir) / "compare.csv", table);
    return 0;
}

int cmd_profiles(const std::string& library_path) {
    const auto lib = library_path.empty() ? ProfileLibrary::builtin() : ProfileLibrary::load(library_path);
    std::printf("%-18s %-6s %10s %12s %8s %14s\n", "name", "where", "ttft_s", "tpot_s", "quality", "reported_s");
    for (const auto& name : lib.names()) {
        const auto& rec = lib.record(name);
        const auto& p = rec.profile;
        std::printf("%-18s %-6s %10.4f %12.6f %8.1f ", p.name.c_str(), std::string(to_string(p.placement)).c_str(),
                    p.ttft_s, p.tpot_s, p.quality_index);
        if (rec.reported_timing_s) {
            std::printf("%14.6f\n", *rec.reported_timing_s);
        } else {
            std::printf("%14s\n", "-");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-cloud generation task offloading simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    auto* run = app.add_subcommand("run", "Run replications of one experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the base seed");
    run->add_option("--out", out_dir, "Output directory");

    std::string sweep_config;
    std::string axis;
    std::string values;
    std::string sweep_out = "out";
    auto* sweep = app.add_subcommand("sweep", "Sweep one axis of an experiment");
    sweep->add_option("--config", sweep_config, "Base experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--axis", axis, "prompt_token_mean | quality_task_fraction | profile_pair")->required();
    sweep->add_option("--values", values, "Comma-separated values (profile pairs as edge+cloud)")->required();
    sweep->add_option("--out", sweep_out, "Output directory");

    std::vector<std::string> compare_configs;
    std::string compare_out = "out";
    auto* compare = app.add_subcommand("compare", "Run several configs and join their summaries");
    compare->add_option("--configs", compare_configs, "Experiment configs")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", compare_out, "Output directory");

    std::string library_path;
    auto* profiles = app.add_subcommand("profiles", "Inspect the LLM profile library");
    auto* list = profiles->add_subcommand("list", "List known profiles");
    profiles->require_subcommand(1);
    list->add_option("--library", library_path, "Profile library JSON (default: built-in)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, seed, out_dir);
        if (*sweep) return cmd_sweep(sweep_config, axis, values, sweep_out);
        if (*compare) return cmd_compare(compare_configs, compare_out);
        if (*list) return cmd_profiles(library_path);
    } catch (const edgegen::Error& e) {
        std::fprintf(stderr, "edgegen: %s\n", e.what());
        return 2;
    }
    return 1;
}
