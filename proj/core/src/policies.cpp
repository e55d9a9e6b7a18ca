#include "edgegen/policies.hpp"

#include "edgegen/delay.hpp"

namespace edgegen {

IclAgent::IclAgent(std::unique_ptr<DecisionOracle> oracle, IclAgentConfig cfg, Rng rng, PromptTemplate tmpl)
    : oracle_(std::move(oracle)),
      cfg_(cfg),
      rng_(std::move(rng)),
      template_(std::move(tmpl)),
      latest_(cfg.latest_window) {
    if (!oracle_) throw InvalidInput("IclAgent needs a decision oracle");
    if (cfg_.bin_width < 1) throw InvalidInput("IclAgent: bin width must be >= 1");
    cfg_.epsilon.validate();
}

std::vector<Experience> IclAgent::example_view() const {
    return cfg_.replay == ReplayMode::prioritized ? pool_.entries() : latest_.entries();
}

MetaPrompt IclAgent::prompt_for(const Condition& query) const {
    const auto view = example_view();
    return build_meta_prompt(std::span<const Experience>(view), query, template_, cfg_.bin_width);
}

double IclAgent::current_epsilon() const { return cfg_.explore ? cfg_.epsilon.at(steps_taken_) : 0.0; }

PolicyChoice IclAgent::choose(const StepContext& ctx) {
    const auto prompt = prompt_for(ctx.condition);
    const auto proposed = decide(*oracle_, prompt, cfg_.oracle_attempts);
    if (!cfg_.explore) return {proposed, false};
    const auto result = epsilon_greedy(rng_, current_epsilon(), proposed);
    return {result.decision, result.explored};
}

void IclAgent::observe(const StepContext& ctx, const StepOutcome& outcome) {
    Experience current{ctx.condition, outcome.decision, outcome.reward, Evaluation::good};
    if (cfg_.replay == ReplayMode::prioritized) {
        last_evaluation_ = pool_.update(current, outcome.quality_ok);
    } else {
        last_evaluation_ = outcome.quality_ok ? Evaluation::good : Evaluation::bad;
        current.evaluation = last_evaluation_;
        latest_.push(current);
    }
    ++steps_taken_;
}

std::string IclAgent::name() const {
    if (cfg_.replay == ReplayMode::latest) return "icl_latest";
    return cfg_.explore ? "icl" : "icl_no_explore";
}

QTable::QTable(double learning_rate) : learning_rate_(learning_rate) {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw InvalidInput("learning rate must be in (0, 1]");
}

double QTable::value(const Condition& c, Decision d) const {
    auto it = cells_.find({c, d});
    return it == cells_.end() ? 0.0 : it->second.value;
}

std::size_t QTable::visits(const Condition& c, Decision d) const {
    auto it = cells_.find({c, d});
    return it == cells_.end() ? 0 : it->second.visits;
}

void QTable::update(const Condition& c, Decision d, double reward) {
    auto& cell = cells_[{c, d}];
    cell.value += learning_rate_ * (reward - cell.value);
    ++cell.visits;
}

Decision QTable::greedy(const Condition& c) const {
    return value(c, Decision::offload) > value(c, Decision::local) ? Decision::offload : Decision::local;
}

std::vector<Condition> QTable::conditions() const {
    std::vector<Condition> out;
    for (const auto& [key, cell] : cells_) {
        if (out.empty() || out.back() != key.first) out.push_back(key.first);
    }
    return out;
}

QLearningPolicy::QLearningPolicy(QLearningConfig cfg, Rng rng)
    : cfg_(cfg), rng_(std::move(rng)), table_(cfg.learning_rate) {
    cfg_.epsilon.validate();
}

PolicyChoice QLearningPolicy::choose(const StepContext& ctx) {
    const auto result = epsilon_greedy(rng_, cfg_.epsilon.at(steps_taken_), table_.greedy(ctx.condition));
    return {result.decision, result.explored};
}

void QLearningPolicy::observe(const StepContext& ctx, const StepOutcome& outcome) {
    table_.update(ctx.condition, outcome.decision, outcome.reward);
    ++steps_taken_;
}

Decision bruteforce_decision(const TaskRequest& task, const LlmProfile& edge, const LlmProfile& cloud,
                             double capacity_bps, const DelayConfig& delay, const RewardConfig& reward) {
    auto evaluate = [&](Decision d) {
        const double t = total_task_delay(task, edge, cloud, d, capacity_bps, delay);
        return step_reward(task, d, t, edge, cloud, reward).reward;
    };
    return evaluate(Decision::offload) > evaluate(Decision::local) ? Decision::offload : Decision::local;
}

PolicyChoice BruteforcePolicy::choose(const StepContext& ctx) {
    return {bruteforce_decision(*ctx.task, *ctx.edge, *ctx.cloud, ctx.capacity_bps, *ctx.delay, *ctx.reward), false};
}

StaticPolicy::StaticPolicy(StaticKind kind, Rng rng) : kind_(kind), rng_(std::move(rng)) {}

PolicyChoice StaticPolicy::choose(const StepContext&) {
    switch (kind_) {
        case StaticKind::always_local:
            return {Decision::local, false};
        case StaticKind::always_offload:
            return {Decision::offload, false};
        case StaticKind::uniform_random: {
            std::bernoulli_distribution coin(0.5);
            return {coin(rng_) ? Decision::offload : Decision::local, false};
        }
    }
    return {Decision::local, false};
}

std::string StaticPolicy::name() const {
    switch (kind_) {
        case StaticKind::always_local:
            return "always_local";
        case StaticKind::always_offload:
            return "always_offload";
        case StaticKind::uniform_random:
            return "uniform_random";
    }
    return "static";
}

}  // namespace edgegen
