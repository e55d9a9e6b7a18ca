#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgegen/common.hpp"

namespace edgegen {

enum class Placement { edge, cloud };

std::string_view to_string(Placement p) noexcept;
Placement parse_placement(std::string_view text);

// Inference timing and quality of one deployed LLM.
struct LlmProfile {
    std::string name;
    double ttft_s = 0.0;           // time to first token
    double tpot_s = 0.0;           // time per output token
    double quality_index = 0.0;    // 0..100
    Placement placement = Placement::edge;

    void validate() const;
};

struct TaskRequest {
    UserId user_id = 0;
    std::size_t task_id = 0;
    TaskType task_type = TaskType::regular;
    std::int64_t n_tokens = 0;
    double quality_req = 0.0;
};

struct DelayConfig {
    double token_size_bytes = 4.0;
    double backhaul_s = 0.05;

    void validate() const;
};

// ttft + n_tokens * tpot.
double generation_time(const TaskRequest& task, const LlmProfile& profile);

// Radio delivery of the generated content plus the backhaul hop when offloaded.
// Throws UnservableLink when capacity_bps <= 0.
double transmission_delay(const TaskRequest& task, double capacity_bps, Decision decision,
                          const DelayConfig& cfg);

double total_task_delay(const TaskRequest& task, const LlmProfile& edge, const LlmProfile& cloud,
                        Decision decision, double capacity_bps, const DelayConfig& cfg);

// Some published timing figures are ambiguous about whether they describe the
// first token or each following token. A profile can carry such a figure in
// reported_timing_s; the interpretation picks which field it overrides.
enum class TimingInterpretation { per_token, first_token };

std::string_view to_string(TimingInterpretation t) noexcept;
TimingInterpretation parse_timing_interpretation(std::string_view text);

struct ProfileRecord {
    LlmProfile profile;
    std::optional<double> reported_timing_s;
};

class ProfileLibrary {
public:
    ProfileLibrary() = default;

    // Compiled-in profiles, identical to data/profiles.json.
    static ProfileLibrary builtin();
    static ProfileLibrary from_json_text(const std::string& text);
    static ProfileLibrary load(const std::filesystem::path& path);

    void add(ProfileRecord record);
    bool contains(const std::string& name) const;
    LlmProfile resolve(const std::string& name,
                       TimingInterpretation interpretation = TimingInterpretation::per_token) const;
    const ProfileRecord& record(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, ProfileRecord> records_;
};

}  // namespace edgegen
