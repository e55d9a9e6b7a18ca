#include "edgegen/llm_client.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <regex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace edgegen {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Whole-word occurrence positions of a lowercase keyword in lowercase text.
std::size_t find_word(const std::string& text, std::string_view word) {
    std::size_t pos = text.find(word);
    while (pos != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
        const auto end = pos + word.size();
        const bool right_ok = end == text.size() || !is_word_char(text[end]);
        if (left_ok && right_ok) return pos;
        pos = text.find(word, pos + 1);
    }
    return std::string::npos;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return out.str();
}

void set_timeouts(httplib::Client& cli, double seconds) {
    const auto usec = static_cast<std::int64_t>(std::max(seconds, 0.001) * 1e6);
    const auto sec = static_cast<time_t>(usec / 1000000);
    const auto rem = static_cast<time_t>(usec % 1000000);
    cli.set_connection_timeout(sec, rem);
    cli.set_read_timeout(sec, rem);
    cli.set_write_timeout(sec, rem);
}

}  // namespace

void OracleEndpointConfig::validate() const {
    if (!(timeout_s > 0.0)) throw ConfigError("oracle.timeout_s must be > 0");
    if (max_retries < 0) throw ConfigError("oracle.max_retries must be >= 0");
    if (!(backoff_initial_s >= 0.0)) throw ConfigError("oracle.backoff_initial_s must be >= 0");
    if (base_url.empty()) throw ConfigError("oracle.base_url is empty");
}

Decision parse_reply_keyword(std::string_view reply) {
    std::string lower(reply);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto local = find_word(lower, "local");
    const auto offload = find_word(lower, "offload");
    if (local == std::string::npos && offload == std::string::npos) {
        throw OracleProtocolError("reply names neither local nor offload: '" + std::string(reply) + "'");
    }
    if (local != std::string::npos && offload != std::string::npos) {
        throw OracleProtocolError("reply names both local and offload: '" + std::string(reply) + "'");
    }
    return local != std::string::npos ? Decision::local : Decision::offload;
}

std::string chat_request_body(const OracleEndpointConfig& cfg, const std::string& prompt_text) {
    json body = {
        {"model", cfg.model_name},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt_text}}})},
        {"temperature", cfg.temperature},
    };
    return body.dump();
}

std::string extract_reply_content(const std::string& response_body) {
    json doc;
    try {
        doc = json::parse(response_body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw OracleProtocolError(std::string("malformed chat-completion response: ") + e.what());
    }
}

std::string prompt_hash(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
    return out.str();
}

std::string to_json_line(const TranscriptRecord& rec) {
    json j = {{"step", rec.step},
              {"prompt_hash", rec.prompt_hash},
              {"reply", rec.reply},
              {"decision", rec.decision},
              {"timestamp", rec.timestamp}};
    return j.dump();
}

TranscriptRecord parse_transcript_line(const std::string& line) {
    try {
        const auto j = json::parse(line);
        TranscriptRecord rec;
        rec.step = j.at("step").get<std::size_t>();
        rec.prompt_hash = j.at("prompt_hash").get<std::string>();
        rec.reply = j.at("reply").get<std::string>();
        rec.decision = j.at("decision").get<std::string>();
        rec.timestamp = j.value("timestamp", std::string{});
        return rec;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed transcript record: ") + e.what());
    }
}

std::vector<TranscriptRecord> load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open transcript " + path.string());
    std::vector<TranscriptRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(parse_transcript_line(line));
    }
    return out;
}

RemoteOracle::RemoteOracle(OracleEndpointConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(cfg_.base_url, m, url_re)) {
        throw ConfigError("oracle.base_url must look like http(s)://host[:port][/path], got '" + cfg_.base_url + "'");
    }
    origin_ = m[1].str();
    path_prefix_ = m[2].matched ? m[2].str() : std::string{};
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();

    if (!cfg_.api_key_env_var.empty()) {
        const char* key = std::getenv(cfg_.api_key_env_var.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("environment variable " + cfg_.api_key_env_var + " holding the oracle credential is not set");
        }
        api_key_ = key;
    }
    if (!cfg_.transcript_path.empty()) {
        transcript_.open(cfg_.transcript_path, std::ios::out | std::ios::trunc);
        if (!transcript_) throw IoError("cannot open transcript " + cfg_.transcript_path.string());
    }
}

RemoteOracle::~RemoteOracle() = default;

std::string RemoteOracle::post_with_retries(const std::string& body) {
    const auto budget = std::chrono::duration<double>(cfg_.timeout_s * (cfg_.max_retries + 1));
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(budget);
    double backoff = cfg_.backoff_initial_s;
    std::string last_error = "no attempt made";

    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        const double remaining = std::chrono::duration<double>(deadline - Clock::now()).count();
        if (remaining <= 0.0) break;

        httplib::Client cli(origin_);
        set_timeouts(cli, std::min(cfg_.timeout_s, remaining));
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
        if (res && res->status == 200) return res->body;

        bool retryable = true;
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
        } else {
            last_error = "HTTP " + std::to_string(res->status);
            retryable = res->status == 408 || res->status == 429 || res->status >= 500;
        }
        if (!retryable || attempt == cfg_.max_retries) break;

        const double left = std::chrono::duration<double>(deadline - Clock::now()).count();
        const double pause = std::min(backoff, std::max(left, 0.0));
        std::this_thread::sleep_for(std::chrono::duration<double>(pause));
        backoff *= 2.0;
    }
    throw TransportError("oracle endpoint " + cfg_.base_url + ": " + last_error);
}

void RemoteOracle::log(const TranscriptRecord& rec) {
    if (!transcript_.is_open()) return;
    transcript_ << to_json_line(rec) << '\n';
    transcript_.flush();
}

std::string RemoteOracle::answer(const MetaPrompt& prompt) {
    const auto text = prompt.render();
    TranscriptRecord rec;
    rec.step = step_++;
    rec.prompt_hash = prompt_hash(text);

    const auto response = post_with_retries(chat_request_body(cfg_, text));
    rec.timestamp = utc_timestamp();
    try {
        rec.reply = extract_reply_content(response);
        rec.decision = std::string(to_string(parse_reply_keyword(rec.reply)));
    } catch (const OracleProtocolError&) {
        log(rec);
        throw;
    }
    log(rec);
    return rec.decision;
}

TranscriptReplayOracle::TranscriptReplayOracle(std::vector<TranscriptRecord> records)
    : records_(std::move(records)) {}

TranscriptReplayOracle TranscriptReplayOracle::load(const std::filesystem::path& path) {
    return TranscriptReplayOracle(load_transcript(path));
}

std::string TranscriptReplayOracle::answer(const MetaPrompt& prompt) {
    if (next_ >= records_.size()) throw OracleProtocolError("transcript exhausted after " + std::to_string(next_) + " replies");
    const auto& rec = records_[next_++];
    const auto hash = prompt_hash(prompt.render());
    if (hash != rec.prompt_hash) {
        throw InvalidInput("transcript step " + std::to_string(rec.step) + " was recorded for a different prompt");
    }
    if (rec.decision.empty()) throw OracleProtocolError("recorded reply had no decision: '" + rec.reply + "'");
    return rec.decision;
}

}  // namespace edgegen
