#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/icl.hpp"

namespace edgegen {

struct OracleEndpointConfig {
    std::string base_url = "http://127.0.0.1:8000/v1";  // POSTs to <base_url>/chat/completions
    std::string model_name = "llama3-8b";
    std::string api_key_env_var = "EDGEGEN_ORACLE_API_KEY";  // empty: send no Authorization header
    double timeout_s = 30.0;
    int max_retries = 2;
    double temperature = 0.0;
    double backoff_initial_s = 0.5;
    std::filesystem::path transcript_path;  // empty: no transcript

    void validate() const;
};

// First whole-word "local" or "offload" in the reply, case-insensitive.
// Neither word, or both, is an OracleProtocolError.
Decision parse_reply_keyword(std::string_view reply);

std::string chat_request_body(const OracleEndpointConfig& cfg, const std::string& prompt_text);

// Content of choices[0].message.content; OracleProtocolError when absent.
std::string extract_reply_content(const std::string& response_body);

// Lowercase hex SHA-256.
std::string prompt_hash(std::string_view text);

struct TranscriptRecord {
    std::size_t step = 0;
    std::string prompt_hash;
    std::string reply;
    std::string decision;  // empty when the reply carried no usable decision
    std::string timestamp;

    bool operator==(const TranscriptRecord&) const = default;
};

std::string to_json_line(const TranscriptRecord& rec);
TranscriptRecord parse_transcript_line(const std::string& line);
std::vector<TranscriptRecord> load_transcript(const std::filesystem::path& path);

// DecisionOracle backed by a chat-completion endpoint. One request in flight;
// a single answer() never blocks longer than timeout_s * (max_retries + 1).
class RemoteOracle final : public DecisionOracle {
public:
    explicit RemoteOracle(OracleEndpointConfig cfg);
    ~RemoteOracle() override;

    RemoteOracle(const RemoteOracle&) = delete;
    RemoteOracle& operator=(const RemoteOracle&) = delete;

    // Returns "local" or "offload"; throws TransportError or OracleProtocolError.
    std::string answer(const MetaPrompt& prompt) override;

    Decision remote_answer(const MetaPrompt& prompt) { return parse_decision(answer(prompt)); }

private:
    std::string post_with_retries(const std::string& body);
    void log(const TranscriptRecord& rec);

    OracleEndpointConfig cfg_;
    std::string origin_;
    std::string path_prefix_;
    std::string api_key_;
    std::size_t step_ = 0;
    std::ofstream transcript_;
};

// Plays back a recorded transcript, one record per answer() call. The prompt
// hash of each call must match the recording.
class TranscriptReplayOracle final : public DecisionOracle {
public:
    explicit TranscriptReplayOracle(std::vector<TranscriptRecord> records);
    static TranscriptReplayOracle load(const std::filesystem::path& path);

    std::string answer(const MetaPrompt& prompt) override;
    std::size_t remaining() const noexcept { return records_.size() - next_; }

private:
    std::vector<TranscriptRecord> records_;
    std::size_t next_ = 0;
};

}  // namespace edgegen
