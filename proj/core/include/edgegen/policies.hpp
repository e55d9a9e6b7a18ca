#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>

#include "edgegen/icl.hpp"
#include "edgegen/objective.hpp"

namespace edgegen {

// Everything a policy may look at when deciding one task.
struct StepContext {
    std::size_t step = 0;
    const TaskRequest* task = nullptr;
    Condition condition;
    double capacity_bps = 0.0;
    const LlmProfile* edge = nullptr;
    const LlmProfile* cloud = nullptr;
    const DelayConfig* delay = nullptr;
    const RewardConfig* reward = nullptr;
};

struct PolicyChoice {
    Decision decision = Decision::local;
    bool explored = false;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyChoice choose(const StepContext& ctx) = 0;
    // Feedback for the decision returned by the preceding choose().
    virtual void observe(const StepContext& ctx, const StepOutcome& outcome) = 0;
    virtual std::string name() const = 0;
};

enum class ReplayMode { prioritized, latest };

struct IclAgentConfig {
    ReplayMode replay = ReplayMode::prioritized;
    std::size_t latest_window = 10;
    bool explore = true;
    EpsilonSchedule epsilon;
    std::int64_t bin_width = 200;
    int oracle_attempts = 3;
};

// In-context-learning agent: renders its example set into a meta prompt, asks
// the oracle, optionally overrides with epsilon-greedy exploration, and feeds
// every outcome back through the replay rules.
class IclAgent final : public Policy {
public:
    IclAgent(std::unique_ptr<DecisionOracle> oracle, IclAgentConfig cfg, Rng rng,
             PromptTemplate tmpl = PromptTemplate::standard());

    PolicyChoice choose(const StepContext& ctx) override;
    void observe(const StepContext& ctx, const StepOutcome& outcome) override;
    std::string name() const override;

    // Example set the next prompt would carry.
    std::vector<Experience> example_view() const;
    MetaPrompt prompt_for(const Condition& query) const;
    const ExperiencePool& pool() const noexcept { return pool_; }
    Evaluation last_evaluation() const noexcept { return last_evaluation_; }
    double current_epsilon() const;

private:
    std::unique_ptr<DecisionOracle> oracle_;
    IclAgentConfig cfg_;
    Rng rng_;
    PromptTemplate template_;
    ExperiencePool pool_;
    LatestExperienceWindow latest_;
    std::size_t steps_taken_ = 0;
    Evaluation last_evaluation_ = Evaluation::good;
};

// One-step value table over (condition, decision): v <- v + lr * (r - v).
class QTable {
public:
    explicit QTable(double learning_rate = 0.1);

    double value(const Condition& c, Decision d) const;
    std::size_t visits(const Condition& c, Decision d) const;
    void update(const Condition& c, Decision d, double reward);
    // Higher value wins; ties go to local.
    Decision greedy(const Condition& c) const;
    std::vector<Condition> conditions() const;
    double learning_rate() const noexcept { return learning_rate_; }

private:
    struct Cell {
        double value = 0.0;
        std::size_t visits = 0;
    };
    double learning_rate_;
    std::map<std::pair<Condition, Decision>, Cell> cells_;
};

struct QLearningConfig {
    double learning_rate = 0.1;
    EpsilonSchedule epsilon;
    std::int64_t bin_width = 200;
};

// Tabular stand-in for a deep value learner; the decision problem has no
// state transition, so the discount is zero.
class QLearningPolicy final : public Policy {
public:
    QLearningPolicy(QLearningConfig cfg, Rng rng);

    PolicyChoice choose(const StepContext& ctx) override;
    void observe(const StepContext& ctx, const StepOutcome& outcome) override;
    std::string name() const override { return "q_learning"; }
    const QTable& table() const noexcept { return table_; }

private:
    QLearningConfig cfg_;
    Rng rng_;
    QTable table_;
    std::size_t steps_taken_ = 0;
};

// Reward-maximising decision for one task (ties to local).
Decision bruteforce_decision(const TaskRequest& task, const LlmProfile& edge, const LlmProfile& cloud,
                             double capacity_bps, const DelayConfig& delay, const RewardConfig& reward);

class BruteforcePolicy final : public Policy {
public:
    PolicyChoice choose(const StepContext& ctx) override;
    void observe(const StepContext&, const StepOutcome&) override {}
    std::string name() const override { return "bruteforce"; }
};

enum class StaticKind { always_local, always_offload, uniform_random };

class StaticPolicy final : public Policy {
public:
    StaticPolicy(StaticKind kind, Rng rng);

    PolicyChoice choose(const StepContext& ctx) override;
    void observe(const StepContext&, const StepOutcome&) override {}
    std::string name() const override;

private:
    StaticKind kind_;
    Rng rng_;
};

}  // namespace edgegen
