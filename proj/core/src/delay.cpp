#include "edgegen/delay.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace edgegen {

namespace {

using nlohmann::json;

// Keep in sync with data/profiles.json (a unit test compares the two).
constexpr const char* kBuiltinProfiles = R"({
  "profiles": [
    {"name": "llama3-8b",      "placement": "edge",  "ttft_s": 0.23, "tpot_s": "1/75", "quality_index": 75},
    {"name": "gpt-class-cloud", "placement": "cloud", "ttft_s": 0.42, "tpot_s": "1/32", "quality_index": 90},
    {"name": "gemma-7b",       "placement": "edge",  "ttft_s": 0.23, "tpot_s": "1/75", "quality_index": 75, "reported_timing_s": "1/155"},
    {"name": "gemini-1.5-pro", "placement": "cloud", "ttft_s": 0.42, "tpot_s": "1/32", "quality_index": 90, "reported_timing_s": "1/58"},
    {"name": "llama2-7b",      "placement": "edge",  "ttft_s": 0.23, "tpot_s": "1/75", "quality_index": 75, "reported_timing_s": "1/89"},
    {"name": "llama2-70b",     "placement": "cloud", "ttft_s": 0.42, "tpot_s": "1/32", "quality_index": 90, "reported_timing_s": "1/40"}
  ]
}
)";

double parse_number_text(const std::string& text, const std::string& field) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("profile field '" + field + "': cannot parse '" + text + "'");
    }
    return value;
}

// Accepts a JSON number or a "num/den" string so reciprocal timings stay exact.
double timing_value(const json& node, const std::string& field) {
    if (node.is_number()) return node.get<double>();
    if (!node.is_string()) throw ConfigError("profile field '" + field + "' must be a number or \"a/b\"");
    const auto text = node.get<std::string>();
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_number_text(text, field);
    const double num = parse_number_text(text.substr(0, slash), field);
    const double den = parse_number_text(text.substr(slash + 1), field);
    if (den == 0.0) throw ConfigError("profile field '" + field + "': zero denominator");
    return num / den;
}

ProfileRecord record_from_json(const json& node) {
    ProfileRecord rec;
    try {
        rec.profile.name = node.at("name").get<std::string>();
        rec.profile.placement = parse_placement(node.at("placement").get<std::string>());
        rec.profile.ttft_s = timing_value(node.at("ttft_s"), "ttft_s");
        rec.profile.tpot_s = timing_value(node.at("tpot_s"), "tpot_s");
        rec.profile.quality_index = node.at("quality_index").get<double>();
        if (node.contains("reported_timing_s")) {
            rec.reported_timing_s = timing_value(node.at("reported_timing_s"), "reported_timing_s");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed profile record: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("malformed profile record: ") + e.what());
    }
    rec.profile.validate();
    return rec;
}

}  // namespace

std::string_view to_string(Placement p) noexcept { return p == Placement::edge ? "edge" : "cloud"; }

Placement parse_placement(std::string_view text) {
    if (text == "edge") return Placement::edge;
    if (text == "cloud") return Placement::cloud;
    throw InvalidInput("unknown placement '" + std::string(text) + "'");
}

void LlmProfile::validate() const {
    if (!(ttft_s >= 0.0)) throw InvalidInput("profile " + name + ": ttft_s must be >= 0");
    if (!(tpot_s > 0.0)) throw InvalidInput("profile " + name + ": tpot_s must be > 0");
    if (!(quality_index >= 0.0 && quality_index <= 100.0)) {
        throw InvalidInput("profile " + name + ": quality_index must be in [0, 100]");
    }
}

void DelayConfig::validate() const {
    if (!(token_size_bytes > 0.0)) throw InvalidInput("delay.token_size_bytes must be > 0");
    if (!(backhaul_s >= 0.0)) throw InvalidInput("delay.backhaul_s must be >= 0");
}

double generation_time(const TaskRequest& task, const LlmProfile& profile) {
    return profile.ttft_s + static_cast<double>(task.n_tokens) * profile.tpot_s;
}

double transmission_delay(const TaskRequest& task, double capacity_bps, Decision decision,
                          const DelayConfig& cfg) {
    if (!(capacity_bps > 0.0)) {
        throw UnservableLink("task " + std::to_string(task.task_id) + " for user " +
                             std::to_string(task.user_id) + ": link capacity " +
                             std::to_string(capacity_bps) + " bit/s");
    }
    const double bits = static_cast<double>(task.n_tokens) * cfg.token_size_bytes * 8.0;
    return bits / capacity_bps + (decision == Decision::offload ? cfg.backhaul_s : 0.0);
}

double total_task_delay(const TaskRequest& task, const LlmProfile& edge, const LlmProfile& cloud,
                        Decision decision, double capacity_bps, const DelayConfig& cfg) {
    const auto& serving = decision == Decision::offload ? cloud : edge;
    return transmission_delay(task, capacity_bps, decision, cfg) + generation_time(task, serving);
}

std::string_view to_string(TimingInterpretation t) noexcept {
    return t == TimingInterpretation::per_token ? "per_token" : "first_token";
}

TimingInterpretation parse_timing_interpretation(std::string_view text) {
    if (text == "per_token") return TimingInterpretation::per_token;
    if (text == "first_token") return TimingInterpretation::first_token;
    throw InvalidInput("unknown timing interpretation '" + std::string(text) + "'");
}

ProfileLibrary ProfileLibrary::builtin() { return from_json_text(kBuiltinProfiles); }

ProfileLibrary ProfileLibrary::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("profile library is not valid JSON: ") + e.what());
    }
    if (!doc.contains("profiles") || !doc["profiles"].is_array()) {
        throw ConfigError("profile library needs a top-level \"profiles\" array");
    }
    ProfileLibrary lib;
    for (const auto& node : doc["profiles"]) lib.add(record_from_json(node));
    return lib;
}

ProfileLibrary ProfileLibrary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile library " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

void ProfileLibrary::add(ProfileRecord record) {
    record.profile.validate();
    auto name = record.profile.name;
    records_.insert_or_assign(std::move(name), std::move(record));
}

bool ProfileLibrary::contains(const std::string& name) const { return records_.count(name) != 0; }

const ProfileRecord& ProfileLibrary::record(const std::string& name) const {
    auto it = records_.find(name);
    if (it == records_.end()) throw ConfigError("unknown LLM profile '" + name + "'");
    return it->second;
}

LlmProfile ProfileLibrary::resolve(const std::string& name, TimingInterpretation interpretation) const {
    const auto& rec = record(name);
    LlmProfile out = rec.profile;
    if (rec.reported_timing_s) {
        if (interpretation == TimingInterpretation::per_token) {
            out.tpot_s = *rec.reported_timing_s;
        } else {
            out.ttft_s = *rec.reported_timing_s;
        }
    }
    out.validate();
    return out;
}

std::vector<std::string> ProfileLibrary::names() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& [name, rec] : records_) out.push_back(name);
    return out;
}

}  // namespace edgegen
