#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "corpus.hpp"

namespace headgate {

enum class JudgeKind { Exact, Containment, ExternalLLM };

struct JudgeVerdict {
    std::string alignment_id;
    std::string language;
    int score = 0;  // 0 or 1
    JudgeKind judge_kind = JudgeKind::Exact;
    std::optional<std::string> raw_reply;  // ExternalLLM only
    std::size_t attempts = 1;
};

struct JudgeClientConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    std::string api_key_env = "HEADGATE_JUDGE_KEY";
    std::size_t max_retries = 3;
    std::chrono::milliseconds timeout{30000};
    double requests_per_minute = 60.0;

    void validate() const;
};

// Binary correctness judge. Implementations must be safe to call from several
// sweep workers at once; the external client serializes internally.
class Judge {
  public:
    virtual ~Judge() = default;
    // Throws (Err::Judge, Err::Credentials) when no verdict can be produced;
    // callers record the example as unscored, never as 0.
    virtual JudgeVerdict judge(const AlignedExample& example, const std::string& response) = 0;
    // Identifies the judging behavior for cache validity checks.
    virtual std::string fingerprint() const = 0;
};

// score 1 iff normalize_answer(response) == normalize_answer(ground_truth).
class ExactJudge final : public Judge {
  public:
    JudgeVerdict judge(const AlignedExample& example, const std::string& response) override;
    std::string fingerprint() const override { return "exact"; }
};

// score 1 iff the normalized ground truth occurs in the normalized response
// at token boundaries.
class ContainmentJudge final : public Judge {
  public:
    JudgeVerdict judge(const AlignedExample& example, const std::string& response) override;
    std::string fingerprint() const override { return "contain"; }
};

// The system message sent verbatim to the external judge.
extern const std::string kJudgeSystemPrompt;

std::string judge_user_message(std::string_view question, std::string_view response,
                               std::string_view ground_truth);

// Key for canned-reply lookup; also what the replay fixture stores.
std::string judge_request_key(std::string_view system_message, std::string_view user_message);

// One HTTP round trip, injectable for tests.
struct HttpReply {
    int status = 0;
    std::string body;
};

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    // nullopt = transport-level failure (connect, timeout).
    virtual std::optional<HttpReply> post_json(const std::string& body) = 0;
};

class Sleeper {
  public:
    virtual ~Sleeper() = default;
    virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

std::unique_ptr<Sleeper> make_real_sleeper();

// Real transport: POSTs to config.endpoint with the key from the configured
// environment variable as a bearer token. Throws Err::Credentials when the
// variable is unset or empty.
std::unique_ptr<HttpTransport> make_http_transport(const JudgeClientConfig& config);

// Chat-completions judge. Sends kJudgeSystemPrompt plus the three-line user
// message at temperature 0 and accepts only a trimmed reply of exactly "1" or
// "0". Transport failures and malformed replies are retried with exponential
// backoff (base 1s, factor 2) up to max_retries attempts, then surfaced as
// errors. Requests are paced by sleeping 60/requests_per_minute seconds
// between consecutive upstream calls, which respects the bound without
// consulting a wall clock.
class LlmJudge final : public Judge {
  public:
    LlmJudge(JudgeClientConfig config, std::unique_ptr<HttpTransport> transport,
             std::unique_ptr<Sleeper> sleeper = make_real_sleeper());

    JudgeVerdict judge(const AlignedExample& example, const std::string& response) override;
    std::string fingerprint() const override;

  private:
    JudgeClientConfig config_;
    std::unique_ptr<HttpTransport> transport_;
    std::unique_ptr<Sleeper> sleeper_;
    std::mutex mutex_;
    bool any_request_sent_ = false;
};

// Offline stand-in for the external judge: replies come from a JSONL fixture
// of {"request_sha256": ..., "reply": ...} keyed by judge_request_key over
// the exact messages the live client would send.
class ReplayJudge final : public Judge {
  public:
    explicit ReplayJudge(const std::filesystem::path& fixture_path);

    JudgeVerdict judge(const AlignedExample& example, const std::string& response) override;
    std::string fingerprint() const override;

  private:
    std::map<std::string, std::string> replies_;
    std::string fixture_digest_;
};

}  // namespace headgate
