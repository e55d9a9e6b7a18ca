#include "edgegen/icl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace edgegen {

namespace {

constexpr const char* kStandardDescription =
    "Task goal: You are given a decision-making task for computational task offloading. "
    "You need to select between two decisions: \"local\" or \"offload\".\n"
    "Task definition: You have to consider the condition of each case, including the following keywords: "
    "Keyword 1: Task types, Keyword 2: Estimated output token size.\n"
    "Rules: Now I give you a new condition to solve, please reply \"local\" or \"offload\" only without "
    "other words.";

constexpr std::string_view kQueryPrefix = "New condition: ";

std::string_view prompt_task_type(TaskType t) {
    return t == TaskType::regular ? "regular" : "quality-preferred";
}

std::string format_reward(double r) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), r);
    return std::string(buf.data(), ptr);
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInput(std::string("cannot parse ") + what + " from '" + std::string(text) + "'");
    }
    return value;
}

const std::regex& condition_regex() {
    static const std::regex re(
        R"(Keywords: \(Task type: (regular|quality-preferred), Estimated output token size: (\d+)-(\d+) tokens\))");
    return re;
}

const std::regex& experience_regex() {
    static const std::regex re(
        R"(^Example \d+: (Keywords: \(.*?\)), Decision: (local|offload), Reward: ([^,]+), Evaluation: (Good|Bad) decision\.$)");
    return re;
}

std::string trim(std::string_view text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

}  // namespace

std::int64_t bin_tokens(std::int64_t n_tokens, std::int64_t bin_width) {
    if (n_tokens < 0) throw InvalidInput("bin_tokens: negative token count");
    if (bin_width < 1) throw InvalidInput("bin_tokens: bin width must be >= 1");
    return n_tokens / bin_width;
}

Evaluation ExperiencePool::update(const Experience& candidate, bool feasible) {
    if (!feasible) return Evaluation::bad;
    auto it = entries_.find(candidate.condition);
    if (it == entries_.end()) {
        Experience stored = candidate;
        stored.evaluation = Evaluation::good;
        entries_.emplace(candidate.condition, stored);
        return Evaluation::good;
    }
    if (candidate.reward > it->second.reward) {
        it->second = candidate;
        it->second.evaluation = Evaluation::good;
        return Evaluation::good;
    }
    if (candidate.reward < it->second.reward) return Evaluation::bad;
    return Evaluation::good;
}

std::optional<Experience> ExperiencePool::find(const Condition& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<Experience> ExperiencePool::entries() const {
    std::vector<Experience> out;
    out.reserve(entries_.size());
    for (const auto& [key, e] : entries_) out.push_back(e);
    return out;
}

LatestExperienceWindow::LatestExperienceWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidInput("latest-experience window needs capacity >= 1");
}

void LatestExperienceWindow::push(const Experience& e) {
    items_.push_back(e);
    while (items_.size() > capacity_) items_.pop_front();
}

PromptTemplate PromptTemplate::standard() { return PromptTemplate{kStandardDescription}; }

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prompt template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto text = trim(buf.str());
    if (text.find("local") == std::string::npos || text.find("offload") == std::string::npos) {
        throw ConfigError("prompt template " + path.string() + " must mention both \"local\" and \"offload\"");
    }
    return PromptTemplate{std::move(text)};
}

std::string MetaPrompt::render() const {
    std::string out = description;
    out += "\n";
    if (!examples.empty()) {
        out += "\nExamples:\n";
        for (const auto& line : examples) {
            out += line;
            out += "\n";
        }
    }
    out += "\n";
    out += query;
    out += "\n";
    return out;
}

std::string render_condition(const Condition& c, std::int64_t bin_width) {
    const auto lo = c.token_bin * bin_width;
    const auto hi = lo + bin_width - 1;
    std::string out = "Keywords: (Task type: ";
    out += prompt_task_type(c.task_type);
    out += ", Estimated output token size: " + std::to_string(lo) + "-" + std::to_string(hi) + " tokens)";
    return out;
}

std::string render_experience(const Experience& e, std::size_t index, std::int64_t bin_width) {
    std::string out = "Example " + std::to_string(index) + ": " + render_condition(e.condition, bin_width);
    out += ", Decision: ";
    out += to_string(e.decision);
    out += ", Reward: " + format_reward(e.reward);
    out += e.evaluation == Evaluation::good ? ", Evaluation: Good decision." : ", Evaluation: Bad decision.";
    return out;
}

MetaPrompt build_meta_prompt(std::span<const Experience> examples, const Condition& query,
                             const PromptTemplate& tmpl, std::int64_t bin_width) {
    if (bin_width < 1) throw InvalidInput("build_meta_prompt: bin width must be >= 1");
    MetaPrompt prompt;
    prompt.description = tmpl.description;
    prompt.examples.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        prompt.examples.push_back(render_experience(examples[i], i + 1, bin_width));
    }
    prompt.query = std::string(kQueryPrefix) + render_condition(query, bin_width);
    return prompt;
}

MetaPrompt build_meta_prompt(const ExperiencePool& pool, const Condition& query, const PromptTemplate& tmpl,
                             std::int64_t bin_width) {
    const auto entries = pool.entries();
    return build_meta_prompt(std::span<const Experience>(entries), query, tmpl, bin_width);
}

Condition parse_condition(std::string_view text) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(text.begin(), text.end(), m, condition_regex())) {
        throw InvalidInput("no keyword block in '" + std::string(text) + "'");
    }
    const auto lo = parse_number<std::int64_t>(std::string_view(&*m[2].first, m[2].length()), "token range");
    const auto hi = parse_number<std::int64_t>(std::string_view(&*m[3].first, m[3].length()), "token range");
    const auto width = hi - lo + 1;
    if (width < 1 || lo % width != 0) throw InvalidInput("inconsistent token range in '" + std::string(text) + "'");
    Condition c;
    c.task_type = m[1].str() == "regular" ? TaskType::regular : TaskType::quality_preferred;
    c.token_bin = lo / width;
    return c;
}

Experience parse_experience(std::string_view line) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(line.begin(), line.end(), m, experience_regex())) {
        throw InvalidInput("not an example line: '" + std::string(line) + "'");
    }
    Experience e;
    e.condition = parse_condition(std::string_view(&*m[1].first, m[1].length()));
    e.decision = parse_decision(m[2].str());
    e.reward = parse_number<double>(std::string_view(&*m[3].first, m[3].length()), "reward");
    e.evaluation = m[4].str() == "Good" ? Evaluation::good : Evaluation::bad;
    return e;
}

ParsedPrompt parse_meta_prompt(std::string_view rendered) {
    ParsedPrompt out;
    bool have_query = false;
    std::size_t pos = 0;
    while (pos <= rendered.size()) {
        auto end = rendered.find('\n', pos);
        if (end == std::string_view::npos) end = rendered.size();
        const auto line = rendered.substr(pos, end - pos);
        if (line.starts_with("Example ")) {
            out.examples.push_back(parse_experience(line));
        } else if (line.starts_with(kQueryPrefix)) {
            out.query = parse_condition(line);
            have_query = true;
        }
        pos = end + 1;
    }
    if (!have_query) throw InvalidInput("meta prompt has no query condition");
    return out;
}

Decision mock_decision(std::span<const Experience> view, const Condition& query) {
    const Experience* best = nullptr;
    auto consider = [&best](const Experience& e) {
        if (best == nullptr || e.reward >= best->reward) best = &e;
    };

    for (const auto& e : view) {
        if (e.condition == query) consider(e);
    }
    if (best != nullptr) return best->decision;

    std::optional<std::int64_t> nearest_bin;
    for (const auto& e : view) {
        if (e.condition.task_type != query.task_type) continue;
        const auto d = std::abs(e.condition.token_bin - query.token_bin);
        if (!nearest_bin) {
            nearest_bin = e.condition.token_bin;
            continue;
        }
        const auto best_d = std::abs(*nearest_bin - query.token_bin);
        if (d < best_d || (d == best_d && e.condition.token_bin < *nearest_bin)) nearest_bin = e.condition.token_bin;
    }
    if (!nearest_bin) return Decision::local;
    for (const auto& e : view) {
        if (e.condition.task_type == query.task_type && e.condition.token_bin == *nearest_bin) consider(e);
    }
    return best->decision;
}

std::string MockOracle::answer(const MetaPrompt& prompt) {
    const auto parsed = parse_meta_prompt(prompt.render());
    return std::string(to_string(mock_decision(parsed.examples, parsed.query)));
}

Decision decide(DecisionOracle& oracle, const MetaPrompt& prompt, int max_attempts) {
    if (max_attempts < 1) throw InvalidInput("decide: max_attempts must be >= 1");
    std::string last_reply;
    std::string last_error;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        try {
            last_reply = oracle.answer(prompt);
        } catch (const OracleProtocolError& e) {
            last_error = e.what();
            continue;
        }
        auto normalized = trim(last_reply);
        std::transform(normalized.begin(), normalized.end(), normalized.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (normalized == "local") return Decision::local;
        if (normalized == "offload") return Decision::offload;
        last_error = "unparsable reply '" + last_reply + "'";
    }
    throw OracleProtocolError("oracle gave no usable decision after " + std::to_string(max_attempts) +
                              " attempt(s): " + last_error);
}

ExplorationResult epsilon_greedy(Rng& rng, double epsilon, Decision oracle_decision) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must be in [0, 1]");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) {
        std::bernoulli_distribution coin(0.5);
        return {coin(rng) ? Decision::offload : Decision::local, true};
    }
    return {oracle_decision, false};
}

double EpsilonSchedule::at(std::size_t step) const {
    return std::max(floor, start * std::pow(decay, static_cast<double>(step)));
}

void EpsilonSchedule::validate() const {
    for (double v : {start, floor}) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("epsilon schedule values must be in [0, 1]");
    }
    if (!(decay > 0.0 && decay <= 1.0)) throw InvalidInput("epsilon decay must be in (0, 1]");
}

}  // namespace edgegen
