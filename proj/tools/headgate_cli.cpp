// Command-line front end. Everything substantive happens behind the C API in
// libheadgate; this file only wires configuration, paths, and exit codes.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "headgate.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEval = 3;
constexpr int kExitIo = 4;

// thrown for CLI-level failures; hg_status failures are mapped directly
struct CliError {
    int exit_code;
    std::string message;
};

int exit_code_for(hg_status status) {
    switch (status) {
        case HG_OK:
            return kExitOk;
        case HG_ERROR_NOT_FOUND:
        case HG_ERROR_FORMAT:
        case HG_ERROR_CONFIG:
        case HG_ERROR_CREDENTIALS:
        case HG_ERROR_INVALID:
            return kExitConfig;
        case HG_ERROR_JUDGE:
        case HG_ERROR_EVAL:
            return kExitEval;
        case HG_ERROR_IO:
        case HG_ERROR_INTERNAL:
            return kExitIo;
    }
    return kExitIo;
}

void check(hg_status status) {
    if (status != HG_OK) {
        throw CliError{exit_code_for(status), hg_last_error_message()};
    }
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{kExitConfig, "cannot open config file '" + path + "'"};
    try {
        json cfg;
        in >> cfg;
        if (!cfg.is_object()) {
            throw CliError{kExitConfig, "config file '" + path + "' must hold a JSON object"};
        }
        return cfg;
    } catch (const json::exception& e) {
        throw CliError{kExitConfig, "config file '" + path + "': " + e.what()};
    }
}

const json* find_field(const json& cfg, const char* section, const char* key) {
    auto sec = cfg.find(section);
    if (sec == cfg.end() || !sec->is_object()) return nullptr;
    auto field = sec->find(key);
    if (field == sec->end()) return nullptr;
    return &*field;
}

template <typename T>
T require_field(const json& cfg, const char* section, const char* key) {
    const json* field = find_field(cfg, section, key);
    if (field == nullptr) {
        throw CliError{kExitConfig,
                       std::string("config is missing ") + section + "." + key};
    }
    try {
        return field->get<T>();
    } catch (const json::exception&) {
        throw CliError{kExitConfig,
                       std::string("config field ") + section + "." + key + " has the wrong type"};
    }
}

template <typename T>
T field_or(const json& cfg, const char* section, const char* key, T fallback) {
    const json* field = find_field(cfg, section, key);
    if (field == nullptr) return fallback;
    try {
        return field->get<T>();
    } catch (const json::exception&) {
        throw CliError{kExitConfig,
                       std::string("config field ") + section + "." + key + " has the wrong type"};
    }
}

uint32_t label_to_index(const json& cfg, const char* key) {
    const auto label = require_field<int64_t>(cfg, "sweep", key);
    if (label < 1) {
        throw CliError{kExitConfig, std::string("config field sweep.") + key +
                                        " must be a 1-based label (got " +
                                        std::to_string(label) + ")"};
    }
    return static_cast<uint32_t>(label - 1);
}

std::string file_digest(const std::string& path) {
    char hex[65];
    check(hg_file_sha256_hex(path.c_str(), hex));
    return hex;
}

// RAII wrappers so error paths don't leak handles
struct ModelHandle {
    hg_model* ptr = nullptr;
    ~ModelHandle() { hg_model_free(ptr); }
};
struct CorpusHandle {
    hg_corpus* ptr = nullptr;
    ~CorpusHandle() { hg_corpus_free(ptr); }
};
struct JudgeHandle {
    hg_judge* ptr = nullptr;
    ~JudgeHandle() { hg_judge_free(ptr); }
};
struct SweepHandle {
    hg_sweep_result* ptr = nullptr;
    ~SweepHandle() { hg_sweep_result_free(ptr); }
};

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::string judge_kind;    // empty = take from config
    std::string replay_path;   // empty = take from config
    std::optional<std::size_t> parallel;
    std::optional<double> delta;
};

void load_corpus_from_config(const json& cfg, CorpusHandle& corpus) {
    const auto path = require_field<std::string>(cfg, "corpus", "path");
    const auto languages = require_field<std::vector<std::string>>(cfg, "corpus", "languages");
    std::vector<const char*> lang_ptrs;
    lang_ptrs.reserve(languages.size());
    for (const std::string& lang : languages) lang_ptrs.push_back(lang.c_str());
    check(hg_corpus_load(path.c_str(), lang_ptrs.data(), lang_ptrs.size(), &corpus.ptr));
}

std::string resolve_judge_kind(const json& cfg, const CommonFlags& flags) {
    const std::string kind = !flags.judge_kind.empty()
                                 ? flags.judge_kind
                                 : field_or<std::string>(cfg, "judge", "kind", "exact");
    if (kind != "exact" && kind != "contain" && kind != "llm" && kind != "replay") {
        throw CliError{kExitConfig, "unknown judge kind '" + kind +
                                        "' (expected exact, contain, llm, or replay)"};
    }
    return kind;
}

void make_judge(const json& cfg, const CommonFlags& flags, JudgeHandle& judge) {
    const std::string kind = resolve_judge_kind(cfg, flags);
    if (kind == "exact") {
        check(hg_judge_create_exact(&judge.ptr));
    } else if (kind == "contain") {
        check(hg_judge_create_containment(&judge.ptr));
    } else if (kind == "replay") {
        const std::string path =
            !flags.replay_path.empty()
                ? flags.replay_path
                : field_or<std::string>(cfg, "judge", "replay_fixture", "");
        if (path.empty()) {
            throw CliError{kExitConfig,
                           "replay judge needs --replay PATH or judge.replay_fixture"};
        }
        check(hg_judge_create_replay(path.c_str(), &judge.ptr));
    } else {
        const auto endpoint = field_or<std::string>(
            cfg, "judge", "endpoint", "https://api.openai.com/v1/chat/completions");
        const auto model = field_or<std::string>(cfg, "judge", "model", "gpt-3.5-turbo");
        const auto key_env =
            field_or<std::string>(cfg, "judge", "api_key_env", "HEADGATE_JUDGE_KEY");
        const auto retries = field_or<int64_t>(cfg, "judge", "max_retries", 3);
        const auto timeout_ms = field_or<int64_t>(cfg, "judge", "timeout_ms", 30000);
        const auto rpm = field_or<double>(cfg, "judge", "requests_per_minute", 60.0);
        check(hg_judge_create_llm(endpoint.c_str(), model.c_str(), key_env.c_str(),
                                  static_cast<size_t>(retries), timeout_ms, rpm, &judge.ptr));
    }
}

ordered_json config_snapshot(const json& cfg, const CommonFlags& flags,
                             const std::string& judge_kind) {
    ordered_json snap;
    snap["model"] = {{"path", require_field<std::string>(cfg, "model", "path")}};
    snap["corpus"] = {{"path", require_field<std::string>(cfg, "corpus", "path")},
                      {"languages", require_field<std::vector<std::string>>(cfg, "corpus",
                                                                            "languages")}};
    const auto epl = require_field<int64_t>(cfg, "sweep", "examples_per_language");
    snap["sweep"] = {{"layer_first", require_field<int64_t>(cfg, "sweep", "layer_first")},
                     {"layer_last", require_field<int64_t>(cfg, "sweep", "layer_last")},
                     {"head_first", require_field<int64_t>(cfg, "sweep", "head_first")},
                     {"head_last", require_field<int64_t>(cfg, "sweep", "head_last")},
                     {"examples_per_language", epl},
                     {"max_new_tokens", require_field<int64_t>(cfg, "sweep", "max_new_tokens")},
                     {"cache_dir", require_field<std::string>(cfg, "sweep", "cache_dir")},
                     {"seed", require_field<uint64_t>(cfg, "sweep", "seed")},
                     {"parallel", flags.parallel.has_value()
                                      ? static_cast<int64_t>(*flags.parallel)
                                      : field_or<int64_t>(cfg, "sweep", "parallel", 1)}};
    double delta = flags.delta.has_value()
                       ? *flags.delta
                       : field_or<double>(cfg, "classify", "delta",
                                          epl > 0 ? 1.0 / static_cast<double>(epl) : 0.0);
    snap["classify"] = {{"delta", delta}};
    ordered_json judge = {{"kind", judge_kind}};
    if (judge_kind == "llm") {
        judge["endpoint"] = field_or<std::string>(cfg, "judge", "endpoint",
                                                  "https://api.openai.com/v1/chat/completions");
        judge["model"] = field_or<std::string>(cfg, "judge", "model", "gpt-3.5-turbo");
        judge["api_key_env"] =
            field_or<std::string>(cfg, "judge", "api_key_env", "HEADGATE_JUDGE_KEY");
    }
    if (judge_kind == "replay") {
        judge["replay_fixture"] = !flags.replay_path.empty()
                                      ? flags.replay_path
                                      : field_or<std::string>(cfg, "judge", "replay_fixture", "");
    }
    snap["judge"] = std::move(judge);
    return snap;
}

void write_manifest(const std::string& out_dir, const char* command, const json& cfg,
                    const CommonFlags& flags, const std::string& judge_kind,
                    const std::string& started_at) {
    ordered_json manifest;
    manifest["toolkit_version"] = hg_version();
    manifest["command"] = command;
    manifest["started_at"] = started_at;
    manifest["finished_at"] = utc_now();
    manifest["model_sha256"] = file_digest(require_field<std::string>(cfg, "model", "path"));
    manifest["corpus_sha256"] = file_digest(require_field<std::string>(cfg, "corpus", "path"));
    manifest["config"] = config_snapshot(cfg, flags, judge_kind);

    const std::string path = out_dir + "/run_manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw CliError{kExitIo, "cannot write '" + path + "'"};
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw CliError{kExitIo, "write failed for '" + path + "'"};
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw CliError{kExitIo,
                       "cannot create output directory '" + out_dir + "': " + ec.message()};
    }
}

double resolve_delta(const json& cfg, const CommonFlags& flags,
                     const std::string& scores_path) {
    if (flags.delta.has_value()) return *flags.delta;
    const json* from_config = find_field(cfg, "classify", "delta");
    if (from_config != nullptr) {
        try {
            return from_config->get<double>();
        } catch (const json::exception&) {
            throw CliError{kExitConfig, "config field classify.delta has the wrong type"};
        }
    }
    // default: one example's worth of accuracy, read off the scores file
    std::ifstream in(scores_path);
    if (!in) {
        throw CliError{kExitConfig, "cannot open '" + scores_path +
                                        "' to derive the default delta (run sweep first)"};
    }
    try {
        json scores;
        in >> scores;
        const auto epl = scores.at("examples_per_language").get<int64_t>();
        if (epl < 1) throw CliError{kExitConfig, "scores file has no usable example count"};
        return 1.0 / static_cast<double>(epl);
    } catch (const json::exception& e) {
        throw CliError{kExitConfig, "scores file '" + scores_path + "': " + e.what()};
    }
}

int cmd_sweep(const CommonFlags& flags) {
    const std::string started_at = utc_now();
    const json cfg = load_config(flags.config_path);

    ModelHandle model;
    check(hg_model_load(require_field<std::string>(cfg, "model", "path").c_str(), &model.ptr));
    CorpusHandle corpus;
    load_corpus_from_config(cfg, corpus);
    JudgeHandle judge;
    make_judge(cfg, flags, judge);

    const std::string cache_dir = require_field<std::string>(cfg, "sweep", "cache_dir");
    hg_sweep_options options{};
    options.layer_first = label_to_index(cfg, "layer_first");
    options.layer_last = label_to_index(cfg, "layer_last");
    options.head_first = label_to_index(cfg, "head_first");
    options.head_last = label_to_index(cfg, "head_last");
    options.examples_per_language =
        static_cast<size_t>(require_field<int64_t>(cfg, "sweep", "examples_per_language"));
    options.max_new_tokens =
        static_cast<size_t>(require_field<int64_t>(cfg, "sweep", "max_new_tokens"));
    options.cache_dir = cache_dir.c_str();
    options.seed = require_field<uint64_t>(cfg, "sweep", "seed");
    options.parallel = flags.parallel.has_value()
                           ? *flags.parallel
                           : static_cast<size_t>(field_or<int64_t>(cfg, "sweep", "parallel", 1));

    SweepHandle result;
    check(hg_run_sweep(model.ptr, corpus.ptr, judge.ptr, &options, &result.ptr));

    ensure_out_dir(flags.out_dir);
    const std::string scores_path = flags.out_dir + "/scores.json";
    const std::string records_path = flags.out_dir + "/records.jsonl";
    check(hg_sweep_result_save(result.ptr, scores_path.c_str(), records_path.c_str()));
    write_manifest(flags.out_dir, "sweep", cfg, flags, resolve_judge_kind(cfg, flags),
                   started_at);

    std::printf("passes total: %zu\n", hg_sweep_result_passes_total(result.ptr));
    std::printf("cells reused: %zu\n", hg_sweep_result_passes_reused(result.ptr));
    std::printf("cells computed: %zu\n", hg_sweep_result_passes_computed(result.ptr));
    for (const auto& lang : require_field<std::vector<std::string>>(cfg, "corpus", "languages")) {
        double accuracy = 0.0;
        check(hg_sweep_result_baseline_accuracy(result.ptr, lang.c_str(), &accuracy));
        std::printf("baseline accuracy [%s]: %.4f\n", lang.c_str(), accuracy);
    }
    std::printf("wrote %s\n", scores_path.c_str());
    return kExitOk;
}

int cmd_classify(const CommonFlags& flags) {
    const std::string started_at = utc_now();
    const json cfg = load_config(flags.config_path);
    const std::string scores_path = flags.out_dir + "/scores.json";
    const std::string classification_path = flags.out_dir + "/classification.json";

    const double delta = resolve_delta(cfg, flags, scores_path);
    ensure_out_dir(flags.out_dir);
    check(hg_classify_file(scores_path.c_str(), delta, classification_path.c_str()));
    check(hg_emit_tables(classification_path.c_str(), flags.out_dir.c_str()));
    write_manifest(flags.out_dir, "classify", cfg, flags, resolve_judge_kind(cfg, flags),
                   started_at);

    // summarize class sizes off the file just written
    std::ifstream in(classification_path);
    json doc;
    in >> doc;
    size_t misc = 0, agnostic = 0, specific = 0;
    for (const auto& head : doc.at("heads")) {
        const auto cls = head.at("class").get<std::string>();
        if (cls == "miscellaneous") ++misc;
        else if (cls == "language_agnostic") ++agnostic;
        else ++specific;
    }
    std::printf("delta: %g\n", delta);
    std::printf("miscellaneous: %zu\n", misc);
    std::printf("language agnostic: %zu\n", agnostic);
    std::printf("language specific: %zu\n", specific);
    std::printf("wrote %s\n", classification_path.c_str());
    return kExitOk;
}

int cmd_report(const CommonFlags& flags) {
    const std::string started_at = utc_now();
    const json cfg = load_config(flags.config_path);
    CorpusHandle corpus;
    load_corpus_from_config(cfg, corpus);

    const std::string scores_path = flags.out_dir + "/scores.json";
    const std::string classification_path = flags.out_dir + "/classification.json";
    const std::string records_path = flags.out_dir + "/records.jsonl";
    check(hg_report_files(scores_path.c_str(), classification_path.c_str(),
                          records_path.c_str(), corpus.ptr, flags.out_dir.c_str()));
    write_manifest(flags.out_dir, "report", cfg, flags, resolve_judge_kind(cfg, flags),
                   started_at);
    std::printf("reports written to %s\n", flags.out_dir.c_str());
    return kExitOk;
}

int cmd_judge_test(const CommonFlags& flags) {
    const json cfg = load_config(flags.config_path);
    JudgeHandle judge;
    make_judge(cfg, flags, judge);

    const char* question = "What is the capital of France?";
    const char* response = "Paris";
    const char* ground_truth = "Paris";
    int score = 0;
    check(hg_judge_score(judge.ptr, question, response, ground_truth, &score));
    std::printf("score: %d\n", score);
    return kExitOk;
}

struct FixtureFlags {
    std::string out_dir = "fixture";
    uint64_t seed = 7;
    uint32_t layers = 2;
    uint32_t heads = 2;
    uint32_t d_head = 8;
    uint32_t max_seq_len = 64;
    uint32_t max_new_tokens = 8;
};

int cmd_fixture(const FixtureFlags& flags) {
    check(hg_fixture_write(flags.out_dir.c_str(), flags.seed, flags.layers, flags.heads,
                           flags.d_head, flags.max_seq_len, flags.max_new_tokens));
    std::printf("fixture written to %s\n", flags.out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-head masking sweeps over gated multi-head attention"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hg_version()));

    CommonFlags flags;
    FixtureFlags fixture_flags;

    auto add_common = [&](CLI::App* cmd, bool with_parallel, bool with_delta) {
        cmd->add_option("--config", flags.config_path, "JSON config file")->required();
        cmd->add_option("--out", flags.out_dir, "output directory (default .)");
        cmd->add_option("--judge", flags.judge_kind,
                        "judge kind: exact, contain, llm, or replay");
        cmd->add_option("--replay", flags.replay_path, "replay fixture for --judge replay");
        if (with_parallel) {
            cmd->add_option_function<std::size_t>(
                "--parallel", [&](std::size_t n) { flags.parallel = n; },
                "concurrent sweep cells (default 1)");
        }
        if (with_delta) {
            cmd->add_option_function<double>(
                "--delta", [&](double d) { flags.delta = d; },
                "classification threshold (default 1/examples_per_language)");
        }
    };

    CLI::App* sweep = app.add_subcommand("sweep", "run the baseline plus one-head-off grid");
    add_common(sweep, true, false);
    CLI::App* classify = app.add_subcommand("classify", "turn scores.json into a head taxonomy");
    add_common(classify, false, true);
    CLI::App* report = app.add_subcommand("report", "emit heatmaps, tables, and diffs");
    add_common(report, false, false);
    CLI::App* judge_test =
        app.add_subcommand("judge-test", "send one canned triple through the judge");
    add_common(judge_test, false, false);

    CLI::App* fixture = app.add_subcommand("fixture", "write a runnable demo model and corpus");
    fixture->add_option("--out", fixture_flags.out_dir, "fixture directory");
    fixture->add_option("--seed", fixture_flags.seed, "weight seed");
    fixture->add_option("--layers", fixture_flags.layers, "layer count");
    fixture->add_option("--heads", fixture_flags.heads, "heads per layer");
    fixture->add_option("--d-head", fixture_flags.d_head, "per-head width");
    fixture->add_option("--max-seq", fixture_flags.max_seq_len, "context length");
    fixture->add_option("--max-new", fixture_flags.max_new_tokens, "generated tokens per answer");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(flags);
        if (classify->parsed()) return cmd_classify(flags);
        if (report->parsed()) return cmd_report(flags);
        if (judge_test->parsed()) return cmd_judge_test(flags);
        if (fixture->parsed()) return cmd_fixture(fixture_flags);
    } catch (const CliError& e) {
        std::fprintf(stderr, "headgate: %s\n", e.message.c_str());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "headgate: %s\n", e.what());
        return kExitIo;
    }
    return kExitConfig;
}
