#include "edgegen/common.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace edgegen {

namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view to_string(Decision d) noexcept {
    return d == Decision::local ? "local" : "offload";
}

std::string_view to_string(TaskType t) noexcept {
    return t == TaskType::regular ? "regular" : "quality_preferred";
}

Decision parse_decision(std::string_view text) {
    const auto lower = lowercase(text);
    if (lower == "local") return Decision::local;
    if (lower == "offload") return Decision::offload;
    throw InvalidInput("unknown decision '" + std::string(text) + "'");
}

TaskType parse_task_type(std::string_view text) {
    const auto lower = lowercase(text);
    if (lower == "regular") return TaskType::regular;
    if (lower == "quality_preferred" || lower == "quality-preferred") return TaskType::quality_preferred;
    throw InvalidInput("unknown task type '" + std::string(text) + "'");
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return Rng(seq);
}

}  // namespace edgegen
