#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/common.hpp"

namespace edgegen {

// Keywords describing one decision context: service type and a bucket of the
// estimated output size.
struct Condition {
    TaskType task_type = TaskType::regular;
    std::int64_t token_bin = 0;

    auto operator<=>(const Condition&) const = default;
};

std::int64_t bin_tokens(std::int64_t n_tokens, std::int64_t bin_width);

enum class Evaluation { good, bad };

struct Experience {
    Condition condition;
    Decision decision = Decision::local;
    double reward = 0.0;
    Evaluation evaluation = Evaluation::good;

    bool operator==(const Experience&) const = default;
};

// Prioritized replay pool: at most one example per condition, always the best
// reward seen for it.
class ExperiencePool {
public:
    // Feeds one outcome through the replay rules and returns its evaluation.
    //  - infeasible (quality constraint violated): bad, pool unchanged
    //  - unseen condition: stored, good
    //  - seen, reward above the stored one: replaces it, good
    //  - seen, reward below: bad, pool unchanged
    //  - seen, equal reward: incumbent kept, good
    Evaluation update(const Experience& candidate, bool feasible = true);

    std::optional<Experience> find(const Condition& key) const;
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    // Ordered by (task_type, token_bin).
    std::vector<Experience> entries() const;

private:
    std::map<Condition, Experience> entries_;
};

inline Evaluation replay_update(ExperiencePool& pool, const Experience& candidate, bool feasible = true) {
    return pool.update(candidate, feasible);
}

// Sliding window over the most recent outcomes, oldest first.
class LatestExperienceWindow {
public:
    explicit LatestExperienceWindow(std::size_t capacity);

    void push(const Experience& e);
    std::vector<Experience> entries() const { return {items_.begin(), items_.end()}; }
    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<Experience> items_;
};

struct PromptTemplate {
    std::string description;

    static PromptTemplate standard();
    static PromptTemplate load(const std::filesystem::path& path);
};

struct MetaPrompt {
    std::string description;
    std::vector<std::string> examples;
    std::string query;

    std::string render() const;
};

std::string render_condition(const Condition& c, std::int64_t bin_width);
std::string render_experience(const Experience& e, std::size_t index, std::int64_t bin_width);

MetaPrompt build_meta_prompt(std::span<const Experience> examples, const Condition& query,
                             const PromptTemplate& tmpl, std::int64_t bin_width);
MetaPrompt build_meta_prompt(const ExperiencePool& pool, const Condition& query, const PromptTemplate& tmpl,
                             std::int64_t bin_width);

// Inverse of the renderers. Throw InvalidInput on text they did not produce.
Condition parse_condition(std::string_view text);
Experience parse_experience(std::string_view line);

struct ParsedPrompt {
    std::vector<Experience> examples;
    Condition query;
};
ParsedPrompt parse_meta_prompt(std::string_view rendered);

// Anything that answers a meta prompt with (ideally) "local" or "offload".
class DecisionOracle {
public:
    virtual ~DecisionOracle() = default;
    virtual std::string answer(const MetaPrompt& prompt) = 0;
};

// Deterministic stand-in for an LLM. Exact keyword match first; otherwise the
// nearest token bin of the same task type (ties to the smaller bin); otherwise
// local. Among several matching examples the highest reward wins.
Decision mock_decision(std::span<const Experience> view, const Condition& query);

// Reads the rendered prompt back and applies mock_decision to it.
class MockOracle final : public DecisionOracle {
public:
    std::string answer(const MetaPrompt& prompt) override;
};

// Asks the oracle up to max_attempts times for a reply that is exactly
// "local" or "offload" (case and surrounding whitespace ignored).
Decision decide(DecisionOracle& oracle, const MetaPrompt& prompt, int max_attempts = 3);

struct ExplorationResult {
    Decision decision = Decision::local;
    bool explored = false;
};

ExplorationResult epsilon_greedy(Rng& rng, double epsilon, Decision oracle_decision);

// Multiplicative decay with a floor: max(floor, start * decay^step).
struct EpsilonSchedule {
    double start = 0.3;
    double decay = 0.997;
    double floor = 0.005;

    double at(std::size_t step) const;
    void validate() const;
};

}  // namespace edgegen
