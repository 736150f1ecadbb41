#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "judge.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "digest.hpp"
#include "error.hpp"
#include "textnorm.hpp"

namespace headgate {

using nlohmann::json;
using nlohmann::ordered_json;

void JudgeClientConfig::validate() const {
    if (endpoint.empty()) throw HgError(Err::Config, "judge endpoint must be non-empty");
    if (model.empty()) throw HgError(Err::Config, "judge model name must be non-empty");
    if (api_key_env.empty()) {
        throw HgError(Err::Config, "judge API key environment variable name must be non-empty");
    }
    if (max_retries < 1) throw HgError(Err::Config, "judge max_retries must be at least 1");
    if (!(requests_per_minute > 0)) {
        throw HgError(Err::Config, "judge requests_per_minute must be positive");
    }
}

JudgeVerdict ExactJudge::judge(const AlignedExample& example, const std::string& response) {
    JudgeVerdict v;
    v.alignment_id = example.alignment_id;
    v.language = example.language;
    v.judge_kind = JudgeKind::Exact;
    v.score = normalize_answer(response) == normalize_answer(example.ground_truth) ? 1 : 0;
    return v;
}

JudgeVerdict ContainmentJudge::judge(const AlignedExample& example, const std::string& response) {
    JudgeVerdict v;
    v.alignment_id = example.alignment_id;
    v.language = example.language;
    v.judge_kind = JudgeKind::Containment;
    v.score = contains_token_bounded(normalize_answer(response),
                                     normalize_answer(example.ground_truth))
                  ? 1
                  : 0;
    return v;
}

const std::string kJudgeSystemPrompt =
    "You are a judge tasked with evaluating the accuracy of an LLM-generated response. You "
    "will be provided with a question from a passage, an LLM response answering the question, "
    "and the ground truth. Your job is to determine if the LLM response accurately conveys "
    "the essential meaning and key information from the ground truth, based on the question "
    "provided."
    "\n\n"
    "1. If the LLM response includes all key information from the ground truth (even if "
    "phrased differently or some words are implied based on the question), return (a score "
    "of) 1."
    "\n\n"
    "2. If the LLM response omits or misrepresents key information that changes the essential "
    "meaning, return (a score of) 0."
    "\n\n"
    "**Important**: In some cases, information in the question itself (such as units, time "
    "references like \"after,\" or context) may not need to be explicitly repeated in the LLM "
    "response if it is implied by the question."
    "\n\n"
    "Your evaluation should focus on the meaning of the LLM response and whether it "
    "accurately answers the question based on the ground truth, without requiring the exact "
    "repetition of minor wording details. Please only return 1 or 0, without additional "
    "text.";

std::string judge_user_message(std::string_view question, std::string_view response,
                               std::string_view ground_truth) {
    std::string msg = "Question: ";
    msg += question;
    msg += "\nLLM response: ";
    msg += response;
    msg += "\nGround truth: ";
    msg += ground_truth;
    return msg;
}

std::string judge_request_key(std::string_view system_message, std::string_view user_message) {
    std::string joined;
    joined.reserve(system_message.size() + 1 + user_message.size());
    joined += system_message;
    joined += '\x1e';
    joined += user_message;
    return sha256_hex(joined);
}

namespace {

std::string trim_ascii(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// -1 = not a verdict
int parse_verdict(std::string_view reply) {
    const std::string t = trim_ascii(reply);
    if (t == "1") return 1;
    if (t == "0") return 0;
    return -1;
}

class RealSleeper final : public Sleeper {
  public:
    void sleep_for(std::chrono::milliseconds d) override { std::this_thread::sleep_for(d); }
};

class HttplibTransport final : public HttpTransport {
  public:
    HttplibTransport(std::string base, std::string path, std::string api_key,
                     std::chrono::milliseconds timeout)
        : client_(base), path_(std::move(path)) {
        client_.set_bearer_token_auth(api_key);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        client_.set_connection_timeout(secs.count(), 0);
        client_.set_read_timeout(secs.count(), 0);
        client_.set_write_timeout(secs.count(), 0);
    }

    std::optional<HttpReply> post_json(const std::string& body) override {
        httplib::Result res = client_.Post(path_, body, "application/json");
        if (!res) return std::nullopt;
        return HttpReply{res->status, res->body};
    }

  private:
    httplib::Client client_;
    std::string path_;
};

}  // namespace

std::unique_ptr<Sleeper> make_real_sleeper() { return std::make_unique<RealSleeper>(); }

std::unique_ptr<HttpTransport> make_http_transport(const JudgeClientConfig& config) {
    config.validate();
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw HgError(Err::Credentials, "environment variable " + config.api_key_env +
                                            " is not set (judge API key)");
    }

    const std::string& url = config.endpoint;
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw HgError(Err::Config, "judge endpoint '" + url + "' has no scheme");
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    return std::make_unique<HttplibTransport>(base, path, key, config.timeout);
}

LlmJudge::LlmJudge(JudgeClientConfig config, std::unique_ptr<HttpTransport> transport,
                   std::unique_ptr<Sleeper> sleeper)
    : config_(std::move(config)), transport_(std::move(transport)),
      sleeper_(std::move(sleeper)) {
    config_.validate();
    if (!transport_) throw HgError(Err::Invalid, "judge transport must be non-null");
    if (!sleeper_) throw HgError(Err::Invalid, "judge sleeper must be non-null");
}

std::string LlmJudge::fingerprint() const { return "llm:" + config_.model; }

JudgeVerdict LlmJudge::judge(const AlignedExample& example, const std::string& response) {
    const std::string user = judge_user_message(example.question, response, example.ground_truth);

    ordered_json body;
    body["model"] = config_.model;
    body["messages"] = ordered_json::array();
    body["messages"].push_back({{"role", "system"}, {"content", kJudgeSystemPrompt}});
    body["messages"].push_back({{"role", "user"}, {"content", user}});
    body["temperature"] = 0;
    const std::string body_str = body.dump();

    const auto pace = std::chrono::milliseconds(
        static_cast<std::int64_t>(60000.0 / config_.requests_per_minute));

    std::lock_guard<std::mutex> lock(mutex_);
    std::string last_failure;
    bool last_was_malformed = false;
    for (std::size_t attempt = 1; attempt <= config_.max_retries; ++attempt) {
        if (any_request_sent_) sleeper_->sleep_for(pace);
        any_request_sent_ = true;

        std::optional<HttpReply> reply = transport_->post_json(body_str);
        std::optional<std::string> content;
        if (!reply.has_value()) {
            last_failure = "transport error";
            last_was_malformed = false;
        } else if (reply->status != 200) {
            last_failure = "HTTP status " + std::to_string(reply->status);
            last_was_malformed = false;
        } else {
            try {
                json parsed = json::parse(reply->body);
                content = parsed.at("choices").at(0).at("message").at("content")
                              .get<std::string>();
            } catch (const json::exception&) {
                last_failure = "unparseable response body";
                last_was_malformed = false;
            }
        }

        if (content.has_value()) {
            const int verdict = parse_verdict(*content);
            if (verdict >= 0) {
                JudgeVerdict v;
                v.alignment_id = example.alignment_id;
                v.language = example.language;
                v.score = verdict;
                v.judge_kind = JudgeKind::ExternalLLM;
                v.raw_reply = *content;
                v.attempts = attempt;
                return v;
            }
            last_failure = "malformed reply: '" + *content + "'";
            last_was_malformed = true;
        }

        if (attempt < config_.max_retries) {
            // exponential backoff: 1s, 2s, 4s, ...
            sleeper_->sleep_for(std::chrono::milliseconds(1000) * (1ll << (attempt - 1)));
        }
    }

    std::ostringstream os;
    os << "judge " << (last_was_malformed ? "reply stayed malformed" : "request kept failing")
       << " after " << config_.max_retries << " attempts (" << last_failure << ")";
    throw HgError(Err::Judge, os.str());
}

ReplayJudge::ReplayJudge(const std::filesystem::path& fixture_path) {
    std::ifstream in(fixture_path);
    if (!in) {
        throw HgError(Err::NotFound,
                      "replay fixture not found: '" + fixture_path.string() + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            std::ostringstream os;
            os << "replay fixture line " << line_no << ": " << e.what();
            throw HgError(Err::Judge, os.str());
        }
        if (!obj.is_object() || !obj.contains("request_sha256") || !obj.contains("reply") ||
            !obj["request_sha256"].is_string() || !obj["reply"].is_string()) {
            std::ostringstream os;
            os << "replay fixture line " << line_no
               << ": expected string fields request_sha256 and reply";
            throw HgError(Err::Judge, os.str());
        }
        const std::string key = obj["request_sha256"].get<std::string>();
        if (!replies_.emplace(key, obj["reply"].get<std::string>()).second) {
            std::ostringstream os;
            os << "replay fixture line " << line_no << ": duplicate request_sha256 " << key;
            throw HgError(Err::Judge, os.str());
        }
    }
    fixture_digest_ = sha256_file_hex(fixture_path);
}

std::string ReplayJudge::fingerprint() const { return "replay:" + fixture_digest_; }

JudgeVerdict ReplayJudge::judge(const AlignedExample& example, const std::string& response) {
    const std::string user = judge_user_message(example.question, response, example.ground_truth);
    const std::string key = judge_request_key(kJudgeSystemPrompt, user);
    auto it = replies_.find(key);
    if (it == replies_.end()) {
        throw HgError(Err::Judge, "replay fixture has no reply for request " + key +
                                      " (alignment_id '" + example.alignment_id + "', " +
                                      example.language + ")");
    }
    const int verdict = parse_verdict(it->second);
    if (verdict < 0) {
        throw HgError(Err::Judge,
                      "replay fixture reply for request " + key + " is malformed: '" +
                          it->second + "'");
    }
    JudgeVerdict v;
    v.alignment_id = example.alignment_id;
    v.language = example.language;
    v.score = verdict;
    v.judge_kind = JudgeKind::ExternalLLM;
    v.raw_reply = it->second;
    v.attempts = 1;
    return v;
}

}  // namespace headgate
