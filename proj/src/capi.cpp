#include "headgate.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "classify.hpp"
#include "corpus.hpp"
#include "digest.hpp"
#include "error.hpp"
#include "fixture.hpp"
#include "judge.hpp"
#include "model.hpp"
#include "report.hpp"
#include "sweep.hpp"
#include "tokenizer.hpp"

struct hg_model {
    headgate::Model impl;
};

struct hg_corpus {
    headgate::AlignedCorpus impl;
};

struct hg_judge {
    std::unique_ptr<headgate::Judge> impl;
};

struct hg_sweep_result {
    headgate::SweepResult impl;
};

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

hg_status map_code(headgate::Err code) {
    switch (code) {
        case headgate::Err::NotFound: return HG_ERROR_NOT_FOUND;
        case headgate::Err::Io: return HG_ERROR_IO;
        case headgate::Err::Format: return HG_ERROR_FORMAT;
        case headgate::Err::Config: return HG_ERROR_CONFIG;
        case headgate::Err::Credentials: return HG_ERROR_CREDENTIALS;
        case headgate::Err::Judge: return HG_ERROR_JUDGE;
        case headgate::Err::Eval: return HG_ERROR_EVAL;
        case headgate::Err::Invalid: return HG_ERROR_INVALID;
    }
    return HG_ERROR_INTERNAL;
}

template <typename Fn>
hg_status guarded(Fn&& fn) {
    try {
        fn();
        return HG_OK;
    } catch (const headgate::HgError& e) {
        set_error(e.what());
        return map_code(e.code());
    } catch (const std::exception& e) {
        set_error(e.what());
        return HG_ERROR_INTERNAL;
    }
}

hg_status invalid(const char* message) {
    set_error(message);
    return HG_ERROR_INVALID;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw headgate::HgError(headgate::Err::Io,
                                "cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw headgate::HgError(headgate::Err::Io, "write failed for '" + path.string() + "'");
    }
}

}  // namespace

extern "C" {

const char* hg_version(void) { return kVersion; }

const char* hg_last_error_message(void) { return g_last_error.c_str(); }

/* ---- model ---- */

hg_status hg_model_load(const char* path, hg_model** out) {
    if (path == nullptr || out == nullptr) return invalid("hg_model_load: NULL argument");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<hg_model>();
        handle->impl = headgate::load_model(path);
        handle->impl.source_digest = headgate::sha256_file_hex(path);
        *out = handle.release();
    });
}

void hg_model_free(hg_model* model) { delete model; }

uint32_t hg_model_n_layers(const hg_model* model) {
    return model != nullptr ? model->impl.config.n_layers : 0;
}

uint32_t hg_model_n_heads(const hg_model* model) {
    return model != nullptr ? model->impl.config.n_heads : 0;
}

uint32_t hg_model_d_model(const hg_model* model) {
    return model != nullptr ? model->impl.config.d_model : 0;
}

uint32_t hg_model_vocab_size(const hg_model* model) {
    return model != nullptr ? model->impl.config.vocab_size : 0;
}

uint32_t hg_model_max_seq_len(const hg_model* model) {
    return model != nullptr ? model->impl.config.max_seq_len : 0;
}

hg_status hg_generate(const hg_model* model, const uint32_t* prompt, size_t prompt_len,
                      const uint8_t* gates, size_t n_gates, size_t max_new_tokens,
                      int64_t eos_token, uint32_t* out_tokens, size_t capacity,
                      size_t* out_len) {
    if (model == nullptr || prompt == nullptr || out_len == nullptr) {
        return invalid("hg_generate: NULL argument");
    }
    *out_len = 0;
    return guarded([&] {
        const headgate::ModelConfig& config = model->impl.config;
        headgate::GateMask mask = headgate::GateMask::all_on(config);
        if (gates != nullptr) {
            mask = headgate::GateMask::from_bytes({gates, n_gates}, config.n_layers,
                                                  config.n_heads);
        }
        const std::vector<headgate::TokenId> suffix =
            headgate::generate({prompt, prompt_len}, mask, max_new_tokens, eos_token, config,
                               model->impl.weights);
        *out_len = suffix.size();
        const size_t n = std::min(capacity, suffix.size());
        for (size_t i = 0; i < n; ++i) out_tokens[i] = suffix[i];
    });
}

/* ---- byte tokenizer ---- */

size_t hg_encode_bytes(const char* text, uint32_t* out_tokens, size_t capacity) {
    if (text == nullptr) return 0;
    const size_t len = std::strlen(text);
    if (out_tokens != nullptr) {
        const size_t n = std::min(capacity, len);
        for (size_t i = 0; i < n; ++i) {
            out_tokens[i] = static_cast<unsigned char>(text[i]);
        }
    }
    return len;
}

size_t hg_decode_bytes(const uint32_t* tokens, size_t n_tokens, char* out_text,
                       size_t capacity) {
    if (tokens == nullptr) return 0;
    const std::string text = headgate::decode_bytes({tokens, n_tokens});
    if (out_text != nullptr && capacity > 0) {
        const size_t n = std::min(capacity - 1, text.size());
        std::memcpy(out_text, text.data(), n);
        out_text[n] = '\0';
    }
    return text.size();
}

/* ---- corpus ---- */

hg_status hg_corpus_load(const char* path, const char* const* languages, size_t n_languages,
                         hg_corpus** out) {
    if (path == nullptr || languages == nullptr || out == nullptr) {
        return invalid("hg_corpus_load: NULL argument");
    }
    *out = nullptr;
    return guarded([&] {
        std::vector<std::string> langs;
        langs.reserve(n_languages);
        for (size_t i = 0; i < n_languages; ++i) {
            if (languages[i] == nullptr) {
                throw headgate::HgError(headgate::Err::Invalid,
                                        "hg_corpus_load: NULL language entry");
            }
            langs.emplace_back(languages[i]);
        }
        auto handle = std::make_unique<hg_corpus>();
        handle->impl = headgate::load_corpus(path, langs);
        *out = handle.release();
    });
}

void hg_corpus_free(hg_corpus* corpus) { delete corpus; }

size_t hg_corpus_size(const hg_corpus* corpus) {
    return corpus != nullptr ? corpus->impl.size() : 0;
}

/* ---- judges ---- */

hg_status hg_judge_create_exact(hg_judge** out) {
    if (out == nullptr) return invalid("hg_judge_create_exact: NULL argument");
    *out = new hg_judge{std::make_unique<headgate::ExactJudge>()};
    return HG_OK;
}

hg_status hg_judge_create_containment(hg_judge** out) {
    if (out == nullptr) return invalid("hg_judge_create_containment: NULL argument");
    *out = new hg_judge{std::make_unique<headgate::ContainmentJudge>()};
    return HG_OK;
}

hg_status hg_judge_create_replay(const char* fixture_path, hg_judge** out) {
    if (fixture_path == nullptr || out == nullptr) {
        return invalid("hg_judge_create_replay: NULL argument");
    }
    *out = nullptr;
    return guarded([&] {
        auto judge = std::make_unique<headgate::ReplayJudge>(fixture_path);
        *out = new hg_judge{std::move(judge)};
    });
}

hg_status hg_judge_create_llm(const char* endpoint, const char* model_name,
                              const char* api_key_env, size_t max_retries, int64_t timeout_ms,
                              double requests_per_minute, hg_judge** out) {
    if (endpoint == nullptr || model_name == nullptr || api_key_env == nullptr ||
        out == nullptr) {
        return invalid("hg_judge_create_llm: NULL argument");
    }
    *out = nullptr;
    return guarded([&] {
        headgate::JudgeClientConfig config;
        config.endpoint = endpoint;
        config.model = model_name;
        config.api_key_env = api_key_env;
        config.max_retries = max_retries;
        config.timeout = std::chrono::milliseconds(timeout_ms);
        config.requests_per_minute = requests_per_minute;
        auto transport = headgate::make_http_transport(config);
        auto judge = std::make_unique<headgate::LlmJudge>(config, std::move(transport));
        *out = new hg_judge{std::move(judge)};
    });
}

void hg_judge_free(hg_judge* judge) { delete judge; }

hg_status hg_judge_score(hg_judge* judge, const char* question, const char* response,
                         const char* ground_truth, int* out_score) {
    if (judge == nullptr || question == nullptr || response == nullptr ||
        ground_truth == nullptr || out_score == nullptr) {
        return invalid("hg_judge_score: NULL argument");
    }
    return guarded([&] {
        headgate::AlignedExample probe;
        probe.alignment_id = "probe";
        probe.language = "und";
        probe.passage = "-";
        probe.question = question;
        probe.ground_truth = ground_truth;
        *out_score = judge->impl->judge(probe, response).score;
    });
}

/* ---- sweep ---- */

hg_status hg_run_sweep(const hg_model* model, const hg_corpus* corpus, hg_judge* judge,
                       const hg_sweep_options* options, hg_sweep_result** out) {
    if (model == nullptr || corpus == nullptr || judge == nullptr || options == nullptr ||
        out == nullptr) {
        return invalid("hg_run_sweep: NULL argument");
    }
    if (options->cache_dir == nullptr) return invalid("hg_run_sweep: NULL cache_dir");
    *out = nullptr;
    return guarded([&] {
        headgate::SweepConfig config;
        config.layers = {options->layer_first, options->layer_last};
        config.heads = {options->head_first, options->head_last};
        config.languages = corpus->impl.languages;
        config.examples_per_language = options->examples_per_language;
        config.max_new_tokens = options->max_new_tokens;
        config.cache_dir = options->cache_dir;
        config.seed = options->seed;
        config.parallel = options->parallel;

        headgate::ModelResponder responder(model->impl, options->max_new_tokens);
        auto handle = std::make_unique<hg_sweep_result>();
        handle->impl = headgate::run_sweep(config, responder, corpus->impl, *judge->impl);
        *out = handle.release();
    });
}

void hg_sweep_result_free(hg_sweep_result* result) { delete result; }

hg_status hg_sweep_result_save(const hg_sweep_result* result, const char* scores_path,
                               const char* records_path) {
    if (result == nullptr) return invalid("hg_sweep_result_save: NULL result");
    return guarded([&] {
        if (scores_path != nullptr) headgate::save_scores(result->impl.scores, scores_path);
        if (records_path != nullptr) {
            headgate::save_records(result->impl.records, records_path);
        }
    });
}

size_t hg_sweep_result_passes_total(const hg_sweep_result* result) {
    return result != nullptr ? result->impl.stats.passes_total : 0;
}

size_t hg_sweep_result_passes_reused(const hg_sweep_result* result) {
    return result != nullptr ? result->impl.stats.passes_reused : 0;
}

size_t hg_sweep_result_passes_computed(const hg_sweep_result* result) {
    return result != nullptr ? result->impl.stats.passes_computed : 0;
}

hg_status hg_sweep_result_baseline_accuracy(const hg_sweep_result* result,
                                            const char* language, double* out) {
    if (result == nullptr || language == nullptr || out == nullptr) {
        return invalid("hg_sweep_result_baseline_accuracy: NULL argument");
    }
    return guarded([&] {
        const auto& per_language = result->impl.scores.per_language;
        auto it = per_language.find(language);
        if (it == per_language.end()) {
            throw headgate::HgError(headgate::Err::Invalid,
                                    std::string("unknown language '") + language + "'");
        }
        *out = it->second.baseline_accuracy;
    });
}

hg_status hg_sweep_result_cell_accuracy(const hg_sweep_result* result, const char* language,
                                        uint32_t layer, uint32_t head, double* out) {
    if (result == nullptr || language == nullptr || out == nullptr) {
        return invalid("hg_sweep_result_cell_accuracy: NULL argument");
    }
    return guarded([&] {
        const headgate::ScoreMatrix& scores = result->impl.scores;
        auto it = scores.per_language.find(language);
        if (it == scores.per_language.end()) {
            throw headgate::HgError(headgate::Err::Invalid,
                                    std::string("unknown language '") + language + "'");
        }
        if (!scores.layers.contains(layer) || !scores.heads.contains(head)) {
            throw headgate::HgError(headgate::Err::Invalid, "cell outside the swept ranges");
        }
        *out = it->second.cell_accuracy.at(layer - scores.layers.first,
                                           head - scores.heads.first);
    });
}

/* ---- classification and reports ---- */

hg_status hg_classify_file(const char* scores_path, double threshold,
                           const char* out_classification_path) {
    if (scores_path == nullptr || out_classification_path == nullptr) {
        return invalid("hg_classify_file: NULL argument");
    }
    return guarded([&] {
        const headgate::ScoreMatrix matrix = headgate::load_scores(scores_path);
        headgate::ClassifyConfig config;
        config.threshold = threshold;
        const headgate::Classification classification =
            headgate::classify_all(matrix, config);
        headgate::save_classification(classification, out_classification_path);
    });
}

hg_status hg_emit_tables(const char* classification_path, const char* out_dir) {
    if (classification_path == nullptr || out_dir == nullptr) {
        return invalid("hg_emit_tables: NULL argument");
    }
    return guarded([&] {
        const headgate::Classification classification =
            headgate::load_classification(classification_path);
        const std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw headgate::HgError(headgate::Err::Io, "cannot create output directory '" +
                                                           dir.string() + "': " + ec.message());
        }
        for (const auto& [name, content] : headgate::taxonomy_tables(classification)) {
            write_text_file(dir / name, content);
        }
    });
}

hg_status hg_report_files(const char* scores_path, const char* classification_path,
                          const char* records_path, const hg_corpus* corpus,
                          const char* out_dir) {
    if (scores_path == nullptr || classification_path == nullptr || records_path == nullptr ||
        corpus == nullptr || out_dir == nullptr) {
        return invalid("hg_report_files: NULL argument");
    }
    return guarded([&] {
        const headgate::ScoreMatrix matrix = headgate::load_scores(scores_path);
        const headgate::Classification classification =
            headgate::load_classification(classification_path);
        const std::vector<headgate::RunRecord> records =
            headgate::load_records(records_path);

        const std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw headgate::HgError(headgate::Err::Io, "cannot create output directory '" +
                                                           dir.string() + "': " + ec.message());
        }

        for (const std::string& lang : matrix.languages) {
            headgate::HeatmapSpec acc{lang, headgate::HeatmapMode::Accuracy, {}, {}};
            headgate::HeatmapSpec delta{lang, headgate::HeatmapMode::DeltaVsBaseline, {}, {}};
            write_text_file(dir / ("heatmap_" + lang + ".csv"),
                            headgate::heatmap_csv(matrix, acc));
            write_text_file(dir / ("heatmap_" + lang + ".svg"),
                            headgate::heatmap_svg(matrix, acc));
            write_text_file(dir / ("heatmap_" + lang + "_delta.csv"),
                            headgate::heatmap_csv(matrix, delta));
            write_text_file(dir / ("heatmap_" + lang + "_delta.svg"),
                            headgate::heatmap_svg(matrix, delta));
        }

        for (const auto& [name, content] : headgate::taxonomy_tables(classification)) {
            write_text_file(dir / name, content);
        }

        const std::vector<headgate::QualitativeDiff> diffs =
            headgate::qualitative_diffs(records, corpus->impl);
        write_text_file(dir / "qualitative_diffs.json",
                        headgate::qualitative_diffs_json(diffs));
    });
}

/* ---- utilities ---- */

hg_status hg_file_sha256_hex(const char* path, char out_hex[65]) {
    if (path == nullptr || out_hex == nullptr) {
        return invalid("hg_file_sha256_hex: NULL argument");
    }
    return guarded([&] {
        const std::string hex = headgate::sha256_file_hex(path);
        std::memcpy(out_hex, hex.c_str(), 65);
    });
}

hg_status hg_fixture_write(const char* dir, uint64_t seed, uint32_t n_layers,
                           uint32_t n_heads, uint32_t d_head, uint32_t max_seq_len,
                           uint32_t max_new_tokens) {
    if (dir == nullptr) return invalid("hg_fixture_write: NULL argument");
    return guarded([&] {
        headgate::write_fixture_dir(dir, seed, n_layers, n_heads, d_head, max_seq_len,
                                    max_new_tokens);
    });
}

} /* extern "C" */
