#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "judge.hpp"
#include "matrix.hpp"
#include "model.hpp"

namespace headgate {

// Inclusive, 0-based. Reports and serialized scores add 1 to every index; the
// paper's "layer 20, head 5" is internal (19, 4).
struct IndexRange {
    std::uint32_t first = 0;
    std::uint32_t last = 0;

    std::uint32_t count() const { return last - first + 1; }
    bool contains(std::uint32_t v) const { return v >= first && v <= last; }
};

struct SweepConfig {
    IndexRange layers;
    IndexRange heads;
    std::vector<std::string> languages;
    std::size_t examples_per_language = 0;
    std::size_t max_new_tokens = 0;
    std::filesystem::path cache_dir;
    std::uint64_t seed = 0;
    std::size_t parallel = 1;

    // Model-dependent checks take the responder's dimensions.
    void validate(std::uint32_t n_layers, std::uint32_t n_heads) const;
};

// What the sweep evaluates: anything that maps (example, gate mask) to a
// response text. Production wraps the model; tests script this directly.
// respond() must be safe to call from several worker threads.
class Responder {
  public:
    virtual ~Responder() = default;
    virtual std::uint32_t n_layers() const = 0;
    virtual std::uint32_t n_heads() const = 0;
    // Identity for cache validity; changes whenever responses could change.
    virtual std::string fingerprint() const = 0;
    virtual std::string respond(const AlignedExample& example, const GateMask& mask) = 0;
};

// Prompt -> BOS + bytes, left-truncated to leave room for generation ->
// greedy decode until EOS.
class ModelResponder final : public Responder {
  public:
    ModelResponder(const Model& model, std::size_t max_new_tokens);

    std::uint32_t n_layers() const override { return model_.config.n_layers; }
    std::uint32_t n_heads() const override { return model_.config.n_heads; }
    std::string fingerprint() const override;
    std::string respond(const AlignedExample& example, const GateMask& mask) override;

  private:
    const Model& model_;
    std::size_t max_new_tokens_;
};

// One evaluated example. layer/head are both set (a masked cell) or both
// empty (baseline). Unscored records keep the judge's error message.
struct RunRecord {
    std::string language;
    std::optional<std::uint32_t> layer;
    std::optional<std::uint32_t> head;
    std::string alignment_id;
    std::string generated_response;
    bool scored = false;
    int score = 0;
    std::string judge_error;
};

// One (gate configuration, language) evaluation pass.
struct EvalOutcome {
    double accuracy = 0.0;        // over scored examples only
    std::size_t scored = 0;
    std::size_t unscored = 0;
    std::vector<RunRecord> records;
};

struct LanguageScores {
    double baseline_accuracy = 0.0;
    std::size_t baseline_scored = 0;
    TMat<double> cell_accuracy;        // layers.count() x heads.count()
    TMat<std::uint32_t> scored_counts;
};

struct ScoreMatrix {
    IndexRange layers;
    IndexRange heads;
    std::vector<std::string> languages;
    std::size_t examples_per_language = 0;
    std::map<std::string, LanguageScores> per_language;
};

struct SweepStats {
    std::size_t passes_total = 0;
    std::size_t passes_reused = 0;
    std::size_t passes_computed = 0;
};

struct SweepResult {
    ScoreMatrix scores;
    std::vector<RunRecord> records;  // deterministic order regardless of --parallel
    SweepStats stats;
};

// Content identity of the evaluated example set; part of the cache guard.
std::string corpus_digest(const AlignedCorpus& corpus);

// Baseline pass (all gates on) over subset(corpus, examples_per_language,
// seed), one outcome per configured language. Aborts (Err::Eval) only when
// every example of some language is unscored.
std::map<std::string, EvalOutcome> run_baseline(const SweepConfig& config, Responder& responder,
                                                const AlignedCorpus& corpus, Judge& judge);

// Same pass with exactly (layer, head) gated off. Rejects out-of-range cells
// before evaluating anything.
std::map<std::string, EvalOutcome> run_cell(const SweepConfig& config, Responder& responder,
                                            const AlignedCorpus& corpus, Judge& judge,
                                            std::uint32_t layer, std::uint32_t head);

// The full grid: baseline plus every (layer, head) cell, per language, with a
// durable cache under config.cache_dir. Completed passes are written
// atomically as they finish; a rerun reuses them and yields byte-identical
// results. A pass file that fails its checksum is recomputed with a warning
// on stderr. A cache directory written under different settings (model,
// corpus, judge, seed, ...) is refused rather than silently mixed.
SweepResult run_sweep(const SweepConfig& config, Responder& responder,
                      const AlignedCorpus& corpus, Judge& judge);

// scores.json: 1-based layer/head labels, cells in row-major (layer, head)
// order. save/load round-trip exactly.
void save_scores(const ScoreMatrix& matrix, const std::filesystem::path& path);
ScoreMatrix load_scores(const std::filesystem::path& path);

// records.jsonl: internal 0-based indices, baseline rows with null layer/head.
void save_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> load_records(const std::filesystem::path& path);

}  // namespace headgate
