#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "digest.hpp"
#include "error.hpp"
#include "textnorm.hpp"
#include "tokenizer.hpp"

namespace headgate {

using nlohmann::json;
using nlohmann::ordered_json;

void SweepConfig::validate(std::uint32_t n_layers, std::uint32_t n_heads) const {
    auto check_range = [](const char* name, const IndexRange& r, std::uint32_t dim) {
        if (r.first > r.last) {
            throw HgError(Err::Config, std::string(name) + " range is inverted");
        }
        if (r.last >= dim) {
            std::ostringstream os;
            os << name << " range [" << r.first << ", " << r.last
               << "] exceeds model dimension " << dim;
            throw HgError(Err::Config, os.str());
        }
    };
    check_range("layer", layers, n_layers);
    check_range("head", heads, n_heads);
    if (languages.empty()) throw HgError(Err::Config, "sweep languages must be non-empty");
    if (examples_per_language < 1) {
        throw HgError(Err::Config, "examples_per_language must be at least 1");
    }
    if (max_new_tokens < 1) throw HgError(Err::Config, "max_new_tokens must be at least 1");
    if (parallel < 1) throw HgError(Err::Config, "parallel must be at least 1");
    if (cache_dir.empty()) throw HgError(Err::Config, "cache_dir must be set");
}

// ---------------------------------------------------------------------------
// ModelResponder
// ---------------------------------------------------------------------------

ModelResponder::ModelResponder(const Model& model, std::size_t max_new_tokens)
    : model_(model), max_new_tokens_(max_new_tokens) {
    model_.config.validate();
    if (model_.config.vocab_size < kByteVocabSize) {
        std::ostringstream os;
        os << "model vocab_size " << model_.config.vocab_size
           << " is too small for the byte tokenizer (needs " << kByteVocabSize << ")";
        throw HgError(Err::Config, os.str());
    }
    if (max_new_tokens_ < 1) throw HgError(Err::Config, "max_new_tokens must be at least 1");
    if (max_new_tokens_ + 2 > model_.config.max_seq_len) {
        std::ostringstream os;
        os << "max_new_tokens " << max_new_tokens_ << " leaves no room for a prompt within "
           << "max_seq_len " << model_.config.max_seq_len;
        throw HgError(Err::Config, os.str());
    }
}

std::string ModelResponder::fingerprint() const {
    return "model:" +
           (model_.source_digest.empty() ? std::string("in-memory") : model_.source_digest);
}

std::string ModelResponder::respond(const AlignedExample& example, const GateMask& mask) {
    std::vector<TokenId> prompt_tokens = encode_bytes(build_prompt(example));
    // keep the tail of an over-long prompt; the question sits at the end
    const std::size_t budget = model_.config.max_seq_len - max_new_tokens_ - 1;  // 1 for BOS
    if (prompt_tokens.size() > budget) {
        prompt_tokens.erase(prompt_tokens.begin(),
                            prompt_tokens.end() - static_cast<long>(budget));
    }
    std::vector<TokenId> tokens;
    tokens.reserve(prompt_tokens.size() + 1);
    tokens.push_back(kBosToken);
    tokens.insert(tokens.end(), prompt_tokens.begin(), prompt_tokens.end());

    const std::vector<TokenId> out = generate(tokens, mask, max_new_tokens_, kEosToken,
                                              model_.config, model_.weights);
    return sanitize_utf8(decode_bytes(out));
}

// ---------------------------------------------------------------------------
// Record serialization (shared by the cache and records.jsonl)
// ---------------------------------------------------------------------------

namespace {

ordered_json record_to_json(const RunRecord& r) {
    ordered_json obj;
    obj["alignment_id"] = r.alignment_id;
    obj["language"] = r.language;
    if (r.layer.has_value()) {
        obj["layer"] = *r.layer;
        obj["head"] = *r.head;
    } else {
        obj["layer"] = nullptr;
        obj["head"] = nullptr;
    }
    obj["response"] = r.generated_response;
    obj["scored"] = r.scored;
    obj["score"] = r.score;
    obj["judge_error"] = r.judge_error;
    return obj;
}

RunRecord record_from_json(const json& obj) {
    RunRecord r;
    r.alignment_id = obj.at("alignment_id").get<std::string>();
    r.language = obj.at("language").get<std::string>();
    const bool has_layer = !obj.at("layer").is_null();
    const bool has_head = !obj.at("head").is_null();
    if (has_layer != has_head) {
        throw HgError(Err::Format, "record must set layer and head together");
    }
    if (has_layer) {
        r.layer = obj.at("layer").get<std::uint32_t>();
        r.head = obj.at("head").get<std::uint32_t>();
    }
    r.generated_response = obj.at("response").get<std::string>();
    r.scored = obj.at("scored").get<bool>();
    r.score = obj.at("score").get<int>();
    if (r.score != 0 && r.score != 1) throw HgError(Err::Format, "record score must be 0 or 1");
    r.judge_error = obj.at("judge_error").get<std::string>();
    return r;
}

EvalOutcome outcome_from_records(std::vector<RunRecord> records) {
    EvalOutcome out;
    std::size_t correct = 0;
    for (const RunRecord& r : records) {
        if (r.scored) {
            ++out.scored;
            correct += static_cast<std::size_t>(r.score);
        } else {
            ++out.unscored;
        }
    }
    out.accuracy =
        out.scored == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(out.scored);
    out.records = std::move(records);
    return out;
}

void require_some_scored(const EvalOutcome& outcome, const std::string& language) {
    if (outcome.scored > 0) return;
    std::string detail;
    for (const RunRecord& r : outcome.records) {
        if (!r.scored && !r.judge_error.empty()) {
            detail = r.judge_error;
            break;
        }
    }
    throw HgError(Err::Eval, "every example of language '" + language +
                                 "' is unscored; evaluation cannot proceed" +
                                 (detail.empty() ? "" : " (" + detail + ")"));
}

struct Cell {
    std::uint32_t layer;
    std::uint32_t head;
};

EvalOutcome evaluate_pass(Responder& responder, const AlignedCorpus& selected,
                          const std::string& language, Judge& judge,
                          const std::optional<Cell>& cell) {
    GateMask mask(responder.n_layers(), responder.n_heads());
    if (cell.has_value()) mask.set(cell->layer, cell->head, false);

    std::vector<RunRecord> records;
    records.reserve(selected.size());
    for (const std::string& id : selected.alignment_ids) {
        const AlignedExample& ex = selected.get(id, language);
        RunRecord r;
        r.language = language;
        if (cell.has_value()) {
            r.layer = cell->layer;
            r.head = cell->head;
        }
        r.alignment_id = id;
        r.generated_response = responder.respond(ex, mask);
        try {
            const JudgeVerdict v = judge.judge(ex, r.generated_response);
            r.scored = true;
            r.score = v.score;
        } catch (const HgError& e) {
            if (e.code() != Err::Judge) throw;
            r.scored = false;
            r.judge_error = e.what();
        }
        records.push_back(std::move(r));
    }
    return outcome_from_records(std::move(records));
}

AlignedCorpus select_examples(const SweepConfig& config, const AlignedCorpus& corpus) {
    for (const std::string& lang : config.languages) {
        if (std::find(corpus.languages.begin(), corpus.languages.end(), lang) ==
            corpus.languages.end()) {
            throw HgError(Err::Config,
                          "configured language '" + lang + "' is not present in the corpus");
        }
    }
    if (config.examples_per_language > corpus.size()) {
        std::ostringstream os;
        os << "examples_per_language " << config.examples_per_language
           << " exceeds corpus size " << corpus.size();
        throw HgError(Err::Config, os.str());
    }
    return subset(corpus, config.examples_per_language, config.seed);
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

constexpr const char* kChecksumPrefix = "#sha256 ";

std::filesystem::path pass_path(const SweepConfig& config, const std::string& language,
                                const std::optional<Cell>& cell) {
    std::filesystem::path dir = config.cache_dir / language;
    if (!cell.has_value()) return dir / "baseline.jsonl";
    return dir / ("L" + std::to_string(cell->layer) + "H" + std::to_string(cell->head) +
                  ".jsonl");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw HgError(Err::Io, "cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw HgError(Err::Io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw HgError(Err::Io,
                      "cannot move '" + tmp.string() + "' into place: " + ec.message());
    }
}

void write_pass_file(const SweepConfig& config, const std::string& language,
                     const std::optional<Cell>& cell, const std::vector<RunRecord>& records) {
    std::string body;
    for (const RunRecord& r : records) {
        body += record_to_json(r).dump();
        body += '\n';
    }
    std::string content = body;
    content += kChecksumPrefix;
    content += sha256_hex(body);
    content += '\n';
    write_file_atomic(pass_path(config, language, cell), content);
}

// A validated cache hit, or nullopt when the file is absent or unusable.
std::optional<std::vector<RunRecord>> load_pass_file(const SweepConfig& config,
                                                     const AlignedCorpus& selected,
                                                     const std::string& language,
                                                     const std::optional<Cell>& cell,
                                                     std::string* why_invalid) {
    const std::filesystem::path path = pass_path(config, language, cell);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;  // absent is normal, not corruption
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    auto invalid = [&](const std::string& why) -> std::optional<std::vector<RunRecord>> {
        if (why_invalid != nullptr) *why_invalid = why;
        return std::nullopt;
    };

    // last line must be the checksum of everything before it
    const std::size_t marker = content.rfind(kChecksumPrefix);
    if (marker == std::string::npos || (marker != 0 && content[marker - 1] != '\n')) {
        return invalid("missing checksum line");
    }
    const std::string body = content.substr(0, marker);
    std::string stated = content.substr(marker + std::strlen(kChecksumPrefix));
    while (!stated.empty() && (stated.back() == '\n' || stated.back() == '\r')) {
        stated.pop_back();
    }
    if (stated != sha256_hex(body)) return invalid("checksum mismatch");

    std::vector<RunRecord> records;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            return invalid(std::string("bad record: ") + e.what());
        }
    }

    if (records.size() != selected.size()) return invalid("record count mismatch");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const RunRecord& r = records[i];
        if (r.alignment_id != selected.alignment_ids[i]) return invalid("alignment_id mismatch");
        if (r.language != language) return invalid("language mismatch");
        const bool want_cell = cell.has_value();
        if (r.layer.has_value() != want_cell) return invalid("cell tag mismatch");
        if (want_cell && (*r.layer != cell->layer || *r.head != cell->head)) {
            return invalid("cell tag mismatch");
        }
    }
    return records;
}

void check_cache_meta(const SweepConfig& config, Responder& responder, Judge& judge,
                      const std::string& corpus_sha) {
    ordered_json meta;
    meta["responder_fingerprint"] = responder.fingerprint();
    meta["judge_fingerprint"] = judge.fingerprint();
    meta["corpus_digest"] = corpus_sha;
    meta["seed"] = config.seed;
    meta["examples_per_language"] = config.examples_per_language;
    meta["max_new_tokens"] = config.max_new_tokens;

    const std::filesystem::path meta_path = config.cache_dir / "cache_meta.json";
    std::ifstream in(meta_path);
    if (in) {
        json existing;
        try {
            in >> existing;
        } catch (const json::exception&) {
            throw HgError(Err::Config, "cache metadata '" + meta_path.string() +
                                           "' is unreadable; delete the cache directory to "
                                           "start over");
        }
        for (const auto& [key, value] : meta.items()) {
            if (!existing.contains(key) || existing[key] != value) {
                throw HgError(Err::Config,
                              "cache directory '" + config.cache_dir.string() +
                                  "' was written under different settings (field '" + key +
                                  "' differs); delete it or point cache_dir elsewhere");
            }
        }
        return;
    }
    write_file_atomic(meta_path, meta.dump(2) + "\n");
}

}  // namespace

std::string corpus_digest(const AlignedCorpus& corpus) {
    std::string buf;
    for (const std::string& lang : corpus.languages) {
        buf += lang;
        buf += '\x1f';
    }
    buf += '\x1e';
    for (const std::string& id : corpus.alignment_ids) {
        for (const std::string& lang : corpus.languages) {
            const AlignedExample& ex = corpus.get(id, lang);
            buf += id;
            buf += '\x1f';
            buf += lang;
            buf += '\x1f';
            buf += ex.passage;
            buf += '\x1f';
            buf += ex.question;
            buf += '\x1f';
            buf += ex.ground_truth;
            buf += '\x1e';
        }
    }
    return sha256_hex(buf);
}

std::map<std::string, EvalOutcome> run_baseline(const SweepConfig& config, Responder& responder,
                                                const AlignedCorpus& corpus, Judge& judge) {
    config.validate(responder.n_layers(), responder.n_heads());
    const AlignedCorpus selected = select_examples(config, corpus);
    std::map<std::string, EvalOutcome> out;
    for (const std::string& lang : config.languages) {
        EvalOutcome outcome = evaluate_pass(responder, selected, lang, judge, std::nullopt);
        require_some_scored(outcome, lang);
        out.emplace(lang, std::move(outcome));
    }
    return out;
}

std::map<std::string, EvalOutcome> run_cell(const SweepConfig& config, Responder& responder,
                                            const AlignedCorpus& corpus, Judge& judge,
                                            std::uint32_t layer, std::uint32_t head) {
    config.validate(responder.n_layers(), responder.n_heads());
    if (!config.layers.contains(layer) || !config.heads.contains(head)) {
        std::ostringstream os;
        os << "cell (" << layer << ", " << head << ") is outside the configured ranges";
        throw HgError(Err::Config, os.str());
    }
    const AlignedCorpus selected = select_examples(config, corpus);
    std::map<std::string, EvalOutcome> out;
    for (const std::string& lang : config.languages) {
        EvalOutcome outcome =
            evaluate_pass(responder, selected, lang, judge, Cell{layer, head});
        require_some_scored(outcome, lang);
        out.emplace(lang, std::move(outcome));
    }
    return out;
}

SweepResult run_sweep(const SweepConfig& config, Responder& responder,
                      const AlignedCorpus& corpus, Judge& judge) {
    config.validate(responder.n_layers(), responder.n_heads());
    const AlignedCorpus selected = select_examples(config, corpus);

    std::error_code ec;
    std::filesystem::create_directories(config.cache_dir, ec);
    if (ec) {
        throw HgError(Err::Io, "cannot create cache directory '" + config.cache_dir.string() +
                                   "': " + ec.message());
    }
    check_cache_meta(config, responder, judge, corpus_digest(selected));

    struct Job {
        std::string language;
        std::optional<Cell> cell;
    };
    std::vector<Job> jobs;
    for (const std::string& lang : config.languages) {
        std::filesystem::create_directories(config.cache_dir / lang, ec);
        if (ec) {
            throw HgError(Err::Io, "cannot create cache directory for '" + lang +
                                       "': " + ec.message());
        }
        jobs.push_back({lang, std::nullopt});
        for (std::uint32_t l = config.layers.first; l <= config.layers.last; ++l) {
            for (std::uint32_t h = config.heads.first; h <= config.heads.last; ++h) {
                jobs.push_back({lang, Cell{l, h}});
            }
        }
    }

    std::vector<EvalOutcome> outcomes(jobs.size());
    std::vector<std::uint8_t> reused(jobs.size(), 0);
    std::mutex stderr_mutex;

    auto run_job = [&](std::size_t i) {
        const Job& job = jobs[i];
        std::string why_invalid;
        if (auto cached = load_pass_file(config, selected, job.language, job.cell, &why_invalid);
            cached.has_value()) {
            outcomes[i] = outcome_from_records(std::move(*cached));
            reused[i] = 1;
        } else {
            if (!why_invalid.empty()) {
                std::lock_guard<std::mutex> lock(stderr_mutex);
                std::cerr << "warning: cache file "
                          << pass_path(config, job.language, job.cell).string() << " invalid ("
                          << why_invalid << "), recomputing\n";
            }
            outcomes[i] = evaluate_pass(responder, selected, job.language, judge, job.cell);
            write_pass_file(config, job.language, job.cell, outcomes[i].records);
        }
        require_some_scored(outcomes[i], job.language);
    };

    if (config.parallel <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            while (!failed.load()) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                try {
                    run_job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_workers = std::min(config.parallel, jobs.size());
        pool.reserve(n_workers);
        for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    SweepResult result;
    result.scores.layers = config.layers;
    result.scores.heads = config.heads;
    result.scores.languages = config.languages;
    result.scores.examples_per_language = config.examples_per_language;
    result.stats.passes_total = jobs.size();

    for (const std::string& lang : config.languages) {
        LanguageScores ls;
        ls.cell_accuracy = TMat<double>(config.layers.count(), config.heads.count());
        ls.scored_counts = TMat<std::uint32_t>(config.layers.count(), config.heads.count());
        result.scores.per_language.emplace(lang, std::move(ls));
    }

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        const EvalOutcome& outcome = outcomes[i];
        LanguageScores& ls = result.scores.per_language.at(job.language);
        if (job.cell.has_value()) {
            const std::size_t r = job.cell->layer - config.layers.first;
            const std::size_t c = job.cell->head - config.heads.first;
            ls.cell_accuracy.at(r, c) = outcome.accuracy;
            ls.scored_counts.at(r, c) = static_cast<std::uint32_t>(outcome.scored);
        } else {
            ls.baseline_accuracy = outcome.accuracy;
            ls.baseline_scored = outcome.scored;
        }
        result.records.insert(result.records.end(), outcome.records.begin(),
                              outcome.records.end());
        if (reused[i]) {
            ++result.stats.passes_reused;
        } else {
            ++result.stats.passes_computed;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// scores.json / records.jsonl
// ---------------------------------------------------------------------------

void save_scores(const ScoreMatrix& matrix, const std::filesystem::path& path) {
    ordered_json doc;
    // serialized labels are 1-based, matching the report tables
    doc["layers"] = {{"first", matrix.layers.first + 1}, {"last", matrix.layers.last + 1}};
    doc["heads"] = {{"first", matrix.heads.first + 1}, {"last", matrix.heads.last + 1}};
    doc["languages"] = matrix.languages;
    doc["examples_per_language"] = matrix.examples_per_language;
    ordered_json per_language = ordered_json::object();
    for (const std::string& lang : matrix.languages) {
        const LanguageScores& ls = matrix.per_language.at(lang);
        ordered_json entry;
        entry["baseline_accuracy"] = ls.baseline_accuracy;
        entry["baseline_scored"] = ls.baseline_scored;
        ordered_json cells = ordered_json::array();
        for (std::uint32_t l = matrix.layers.first; l <= matrix.layers.last; ++l) {
            for (std::uint32_t h = matrix.heads.first; h <= matrix.heads.last; ++h) {
                const std::size_t r = l - matrix.layers.first;
                const std::size_t c = h - matrix.heads.first;
                ordered_json cell;
                cell["layer"] = l + 1;
                cell["head"] = h + 1;
                cell["accuracy"] = ls.cell_accuracy.at(r, c);
                cell["scored"] = ls.scored_counts.at(r, c);
                cells.push_back(std::move(cell));
            }
        }
        entry["cells"] = std::move(cells);
        per_language[lang] = std::move(entry);
    }
    doc["per_language"] = std::move(per_language);
    write_file_atomic(path, doc.dump(2) + "\n");
}

ScoreMatrix load_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw HgError(Err::NotFound, "scores file not found: '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw HgError(Err::Format, "scores file '" + path.string() + "': " + e.what());
    }

    ScoreMatrix matrix;
    try {
        const std::uint32_t layer_first = doc.at("layers").at("first").get<std::uint32_t>();
        const std::uint32_t layer_last = doc.at("layers").at("last").get<std::uint32_t>();
        const std::uint32_t head_first = doc.at("heads").at("first").get<std::uint32_t>();
        const std::uint32_t head_last = doc.at("heads").at("last").get<std::uint32_t>();
        if (layer_first < 1 || head_first < 1 || layer_first > layer_last ||
            head_first > head_last) {
            throw HgError(Err::Format, "scores file has invalid layer/head label ranges");
        }
        matrix.layers = {layer_first - 1, layer_last - 1};
        matrix.heads = {head_first - 1, head_last - 1};
        matrix.languages = doc.at("languages").get<std::vector<std::string>>();
        if (matrix.languages.empty()) {
            throw HgError(Err::Format, "scores file lists no languages");
        }
        matrix.examples_per_language = doc.at("examples_per_language").get<std::size_t>();

        for (const std::string& lang : matrix.languages) {
            const json& entry = doc.at("per_language").at(lang);
            LanguageScores ls;
            ls.baseline_accuracy = entry.at("baseline_accuracy").get<double>();
            ls.baseline_scored = entry.at("baseline_scored").get<std::size_t>();
            ls.cell_accuracy = TMat<double>(matrix.layers.count(), matrix.heads.count());
            ls.scored_counts = TMat<std::uint32_t>(matrix.layers.count(), matrix.heads.count());
            const json& cells = entry.at("cells");
            if (cells.size() != ls.cell_accuracy.data.size()) {
                throw HgError(Err::Format, "scores file cell count does not match its ranges");
            }
            for (const json& cell : cells) {
                const std::uint32_t l = cell.at("layer").get<std::uint32_t>();
                const std::uint32_t h = cell.at("head").get<std::uint32_t>();
                if (l < 1 || h < 1 || !matrix.layers.contains(l - 1) ||
                    !matrix.heads.contains(h - 1)) {
                    throw HgError(Err::Format, "scores file cell label out of range");
                }
                const std::size_t r = (l - 1) - matrix.layers.first;
                const std::size_t c = (h - 1) - matrix.heads.first;
                ls.cell_accuracy.at(r, c) = cell.at("accuracy").get<double>();
                ls.scored_counts.at(r, c) = cell.at("scored").get<std::uint32_t>();
            }
            matrix.per_language.emplace(lang, std::move(ls));
        }
    } catch (const json::exception& e) {
        throw HgError(Err::Format, "scores file '" + path.string() + "': " + e.what());
    }
    return matrix;
}

void save_records(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    std::string body;
    for (const RunRecord& r : records) {
        body += record_to_json(r).dump();
        body += '\n';
    }
    write_file_atomic(path, body);
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw HgError(Err::NotFound, "records file not found: '" + path.string() + "'");
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "records file '" << path.string() << "' line " << line_no << ": " << e.what();
            throw HgError(Err::Format, os.str());
        }
    }
    return records;
}

}  // namespace headgate
