#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <string>
#include <vector>

#include "error.hpp"
#include "fixture.hpp"
#include "helpers.hpp"
#include "sweep.hpp"
#include "tokenizer.hpp"

using namespace headgate;
using testutil::ScriptedJudge;
using testutil::StubResponder;
using testutil::TempDir;

namespace {

SweepConfig small_config(const std::filesystem::path& cache_dir) {
    SweepConfig config;
    config.layers = {0, 1};
    config.heads = {0, 2};
    config.languages = {"en", "hi"};
    config.examples_per_language = 3;
    config.max_new_tokens = 4;
    config.cache_dir = cache_dir;
    config.seed = 5;
    config.parallel = 1;
    return config;
}

ScriptedJudge exact_judge() {
    return ScriptedJudge("exact", [](const AlignedExample& ex, const std::string& response) {
        return response == ex.ground_truth ? 1 : 0;
    });
}

// Wrong answer for `language` when gate (layer, head) is off; truth otherwise.
StubResponder::Fn degrade_cell(std::uint32_t layer, std::uint32_t head, std::string language) {
    return [=](const AlignedExample& ex, const GateMask& mask) -> std::string {
        if (!mask.on(layer, head) && ex.language == language) return "degraded";
        return ex.ground_truth;
    };
}

}  // namespace

TEST_CASE("sweep config validation") {
    TempDir tmp;
    SweepConfig config = small_config(tmp / "cache");
    CHECK_NOTHROW(config.validate(2, 3));

    SweepConfig bad = config;
    bad.layers = {1, 0};
    CHECK_THROWS_AS(bad.validate(2, 3), HgError);

    bad = config;
    bad.layers = {0, 2};
    try {
        bad.validate(2, 3);
        FAIL("expected throw");
    } catch (const HgError& e) {
        CHECK(e.code() == Err::Config);
        CHECK(std::string(e.what()).find("layer") != std::string::npos);
    }

    bad = config;
    bad.heads = {0, 3};
    CHECK_THROWS_AS(bad.validate(2, 3), HgError);

    bad = config;
    bad.examples_per_language = 0;
    CHECK_THROWS_AS(bad.validate(2, 3), HgError);

    bad = config;
    bad.languages = {};
    CHECK_THROWS_AS(bad.validate(2, 3), HgError);
}

TEST_CASE("corpus digest tracks content") {
    AlignedCorpus corpus = testutil::make_grid_corpus(3, {"en", "hi"});
    const std::string base = corpus_digest(corpus);
    CHECK(base.size() == 64);
    CHECK(corpus_digest(corpus) == base);

    AlignedCorpus changed = corpus;
    changed.examples["q2"]["hi"].ground_truth = "different";
    CHECK(corpus_digest(changed) != base);

    AlignedCorpus reordered = corpus;
    std::swap(reordered.languages[0], reordered.languages[1]);
    CHECK(corpus_digest(reordered) != base);
}

TEST_CASE("run_baseline scores every language over the selected subset") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(5, {"en", "hi"});
    SweepConfig config = small_config(tmp / "cache");
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();

    const auto outcomes = run_baseline(config, responder, corpus, judge);
    REQUIRE(outcomes.size() == 2);
    for (const auto& [lang, outcome] : outcomes) {
        CHECK(outcome.accuracy == 1.0);
        CHECK(outcome.scored == 3);
        CHECK(outcome.unscored == 0);
        REQUIRE(outcome.records.size() == 3);
        for (const auto& r : outcome.records) {
            CHECK(r.language == lang);
            CHECK_FALSE(r.layer.has_value());
            CHECK(r.scored);
            CHECK(r.score == 1);
        }
    }
    // the same seed picks the same alignment ids for both languages
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(outcomes.at("en").records[i].alignment_id ==
              outcomes.at("hi").records[i].alignment_id);
    }
}

TEST_CASE("run_cell rejects out-of-range cells") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en", "hi"});
    SweepConfig config = small_config(tmp / "cache");
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();

    CHECK_THROWS_AS(run_cell(config, responder, corpus, judge, 5, 0), HgError);
    const auto outcomes = run_cell(config, responder, corpus, judge, 1, 2);
    CHECK(outcomes.at("en").accuracy == 1.0);
}

TEST_CASE("run_sweep fills the grid and records the degradation") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en", "hi"});
    SweepConfig config = small_config(tmp / "cache");
    StubResponder responder(2, 3, "stub-1", degrade_cell(1, 2, "en"));
    auto judge = exact_judge();

    const SweepResult result = run_sweep(config, responder, corpus, judge);

    // 2 languages x (baseline + 2*3 cells)
    CHECK(result.stats.passes_total == 14);
    CHECK(result.stats.passes_computed == 14);
    CHECK(result.stats.passes_reused == 0);

    const LanguageScores& en = result.scores.per_language.at("en");
    const LanguageScores& hi = result.scores.per_language.at("hi");
    CHECK(en.baseline_accuracy == 1.0);
    CHECK(hi.baseline_accuracy == 1.0);
    CHECK(en.cell_accuracy.at(1, 2) == 0.0);
    CHECK(en.cell_accuracy.at(0, 0) == 1.0);
    CHECK(en.cell_accuracy.at(1, 1) == 1.0);
    CHECK(hi.cell_accuracy.at(1, 2) == 1.0);
    CHECK(en.scored_counts.at(1, 2) == 3);

    // records: per language, baseline first, then cells layer-major
    REQUIRE(result.records.size() == 14 * 3);
    CHECK(result.records[0].language == "en");
    CHECK_FALSE(result.records[0].layer.has_value());
    const RunRecord& first_cell = result.records[3];
    CHECK(first_cell.layer == 0);
    CHECK(first_cell.head == 0);
    const RunRecord& last_en = result.records[20];
    CHECK(last_en.language == "en");
    CHECK(last_en.layer == 1);
    CHECK(last_en.head == 2);
    CHECK(last_en.generated_response == "degraded");
    CHECK(result.records[21].language == "hi");

    // cache bytes exist with 0-based names and a checksum trailer
    const auto cell_path = tmp / "cache" / "en" / "L1H2.jsonl";
    REQUIRE(std::filesystem::exists(cell_path));
    const std::string cell_bytes = testutil::read_file(cell_path);
    CHECK(cell_bytes.find("#sha256 ") != std::string::npos);
    CHECK(std::filesystem::exists(tmp / "cache" / "hi" / "baseline.jsonl"));
    CHECK(std::filesystem::exists(tmp / "cache" / "cache_meta.json"));
}

TEST_CASE("a second run reuses the cache and reproduces bytes") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en", "hi"});
    SweepConfig config = small_config(tmp / "cache");
    auto judge = exact_judge();

    StubResponder responder(2, 3, "stub-1", degrade_cell(0, 1, "hi"));
    const SweepResult first = run_sweep(config, responder, corpus, judge);
    save_scores(first.scores, tmp / "scores_a.json");
    save_records(first.records, tmp / "records_a.jsonl");

    const SweepResult second = run_sweep(config, responder, corpus, judge);
    CHECK(second.stats.passes_reused == 14);
    CHECK(second.stats.passes_computed == 0);
    save_scores(second.scores, tmp / "scores_b.json");
    save_records(second.records, tmp / "records_b.jsonl");

    CHECK(testutil::read_file(tmp / "scores_a.json") ==
          testutil::read_file(tmp / "scores_b.json"));
    CHECK(testutil::read_file(tmp / "records_a.jsonl") ==
          testutil::read_file(tmp / "records_b.jsonl"));
}

TEST_CASE("a missing cell is recomputed, the rest reused") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();

    run_sweep(config, responder, corpus, judge);
    std::filesystem::remove(tmp / "cache" / "en" / "L0H1.jsonl");

    const SweepResult again = run_sweep(config, responder, corpus, judge);
    CHECK(again.stats.passes_total == 7);
    CHECK(again.stats.passes_reused == 6);
    CHECK(again.stats.passes_computed == 1);
}

TEST_CASE("a corrupt cell is recomputed with a warning") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();

    run_sweep(config, responder, corpus, judge);

    const auto path = tmp / "cache" / "en" / "L1H0.jsonl";
    std::string bytes = testutil::read_file(path);
    bytes[bytes.find("truth")] = 'T';  // break the checksum
    testutil::write_file(path, bytes);

    const SweepResult again = run_sweep(config, responder, corpus, judge);
    CHECK(again.stats.passes_computed == 1);
    CHECK(again.stats.passes_reused == 6);
    CHECK(again.scores.per_language.at("en").cell_accuracy.at(1, 0) == 1.0);
    // the recomputed file is valid again
    const SweepResult third = run_sweep(config, responder, corpus, judge);
    CHECK(third.stats.passes_reused == 7);
}

TEST_CASE("a cache written under different settings is refused") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();
    run_sweep(config, responder, corpus, judge);

    SUBCASE("different seed") {
        // a different seed also reshuffles the selected subset, so either the
        // digest or the seed field trips the guard; both must refuse
        config.seed = 6;
        try {
            run_sweep(config, responder, corpus, judge);
            FAIL("expected throw");
        } catch (const HgError& e) {
            CHECK(e.code() == Err::Config);
            CHECK(std::string(e.what()).find("different settings") != std::string::npos);
        }
    }

    SUBCASE("different responder") {
        StubResponder other(2, 3, "stub-2", testutil::echo_truth());
        try {
            run_sweep(config, other, corpus, judge);
            FAIL("expected throw");
        } catch (const HgError& e) {
            CHECK(e.code() == Err::Config);
            CHECK(std::string(e.what()).find("responder_fingerprint") != std::string::npos);
        }
    }

    SUBCASE("different judge") {
        ScriptedJudge other("other-judge", [](const AlignedExample&, const std::string&) {
            return 1;
        });
        CHECK_THROWS_AS(run_sweep(config, responder, corpus, other), HgError);
    }

    SUBCASE("different corpus content") {
        AlignedCorpus changed = corpus;
        for (auto& [id, by_lang] : changed.examples) {
            for (auto& [lang, ex] : by_lang) ex.ground_truth += " edited";
        }
        CHECK_THROWS_AS(run_sweep(config, responder, changed, judge), HgError);
    }

    SUBCASE("unreadable meta") {
        testutil::write_file(tmp / "cache" / "cache_meta.json", "not json");
        CHECK_THROWS_AS(run_sweep(config, responder, corpus, judge), HgError);
    }
}

TEST_CASE("meta mismatch names the differing field") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    config.examples_per_language = 4;  // full corpus; the subset is seed-independent
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();
    run_sweep(config, responder, corpus, judge);

    config.seed = 99;
    try {
        run_sweep(config, responder, corpus, judge);
        FAIL("expected throw");
    } catch (const HgError& e) {
        CHECK(e.code() == Err::Config);
        CHECK(std::string(e.what()).find("'seed'") != std::string::npos);
    }
}

TEST_CASE("extending the ranges reuses completed cells") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en"});
    SweepConfig narrow = small_config(tmp / "cache");
    narrow.languages = {"en"};
    narrow.layers = {0, 0};
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    auto judge = exact_judge();

    run_sweep(narrow, responder, corpus, judge);  // baseline + 3 cells

    SweepConfig wide = narrow;
    wide.layers = {0, 1};
    const SweepResult result = run_sweep(wide, responder, corpus, judge);
    CHECK(result.stats.passes_total == 7);
    CHECK(result.stats.passes_reused == 4);
    CHECK(result.stats.passes_computed == 3);
}

TEST_CASE("judge failures leave examples unscored, not zero") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(3, {"en", "hi"});
    SweepConfig config = small_config(tmp / "cache");
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    ScriptedJudge flaky("flaky", [](const AlignedExample& ex, const std::string& response) -> int {
        if (ex.alignment_id == "q2" && ex.language == "en") {
            throw HgError(Err::Judge, "synthetic judge outage");
        }
        return response == ex.ground_truth ? 1 : 0;
    });

    const SweepResult result = run_sweep(config, responder, corpus, flaky);
    const LanguageScores& en = result.scores.per_language.at("en");
    CHECK(en.baseline_accuracy == 1.0);  // over the scored two only
    CHECK(en.baseline_scored == 2);
    CHECK(en.scored_counts.at(0, 0) == 2);
    CHECK(result.scores.per_language.at("hi").baseline_scored == 3);

    bool saw_unscored = false;
    for (const RunRecord& r : result.records) {
        if (r.alignment_id == "q2" && r.language == "en") {
            CHECK_FALSE(r.scored);
            CHECK(r.judge_error.find("synthetic judge outage") != std::string::npos);
            saw_unscored = true;
        } else {
            CHECK(r.scored);
        }
    }
    CHECK(saw_unscored);
}

TEST_CASE("a fully unscored language aborts the pass") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(3, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    ScriptedJudge dead("dead", [](const AlignedExample&, const std::string&) -> int {
        throw HgError(Err::Judge, "judge is down");
    });

    try {
        run_sweep(config, responder, corpus, dead);
        FAIL("expected throw");
    } catch (const HgError& e) {
        CHECK(e.code() == Err::Eval);
        CHECK(std::string(e.what()).find("en") != std::string::npos);
    }
}

TEST_CASE("non-judge errors propagate instead of unscoring") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(3, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    ScriptedJudge broken("broken", [](const AlignedExample&, const std::string&) -> int {
        throw HgError(Err::Credentials, "key went missing");
    });

    try {
        run_sweep(config, responder, corpus, broken);
        FAIL("expected throw");
    } catch (const HgError& e) {
        CHECK(e.code() == Err::Credentials);
    }
}

TEST_CASE("parallel sweeps produce byte-identical outputs") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(6, {"en", "hi"});
    StubResponder responder(3, 4, "stub-1", degrade_cell(2, 3, "hi"));
    auto judge = exact_judge();

    SweepConfig serial;
    serial.layers = {0, 2};
    serial.heads = {0, 3};
    serial.languages = {"en", "hi"};
    serial.examples_per_language = 4;
    serial.max_new_tokens = 4;
    serial.seed = 8;
    serial.cache_dir = tmp / "cache_serial";
    serial.parallel = 1;

    SweepConfig parallel = serial;
    parallel.cache_dir = tmp / "cache_parallel";
    parallel.parallel = 4;

    const SweepResult a = run_sweep(serial, responder, corpus, judge);
    const SweepResult b = run_sweep(parallel, responder, corpus, judge);

    save_scores(a.scores, tmp / "a.json");
    save_scores(b.scores, tmp / "b.json");
    save_records(a.records, tmp / "a.jsonl");
    save_records(b.records, tmp / "b.jsonl");
    CHECK(testutil::read_file(tmp / "a.json") == testutil::read_file(tmp / "b.json"));
    CHECK(testutil::read_file(tmp / "a.jsonl") == testutil::read_file(tmp / "b.jsonl"));
    CHECK(b.stats.passes_computed == 26);
}

TEST_CASE("parallel failures surface the first error") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(3, {"en"});
    SweepConfig config = small_config(tmp / "cache");
    config.languages = {"en"};
    config.parallel = 4;
    StubResponder responder(2, 3, "stub-1", testutil::echo_truth());
    ScriptedJudge dead("dead", [](const AlignedExample&, const std::string&) -> int {
        throw HgError(Err::Judge, "judge is down");
    });
    CHECK_THROWS_AS(run_sweep(config, responder, corpus, dead), HgError);
}

TEST_CASE("scores round trip with 1-based labels") {
    TempDir tmp;
    const AlignedCorpus corpus = testutil::make_grid_corpus(4, {"en", "hi"});
    SweepConfig config = small_config(tmp / "cache");
    StubResponder responder(2, 3, "stub-1", degrade_cell(1, 2, "en"));
    auto judge = exact_judge();
    const SweepResult result = run_sweep(config, responder, corpus, judge);

    const auto path = tmp / "scores.json";
    save_scores(result.scores, path);
    const std::string text = testutil::read_file(path);
    // internal layer 1 head 2 surfaces as labels 2 and 3
    CHECK(text.find("\"layer\": 2") != std::string::npos);
    CHECK(text.find("\"head\": 3") != std::string::npos);
    CHECK(text.find("\"layer\": 0") == std::string::npos);

    const ScoreMatrix loaded = load_scores(path);
    CHECK(loaded.layers.first == result.scores.layers.first);
    CHECK(loaded.layers.last == result.scores.layers.last);
    CHECK(loaded.languages == result.scores.languages);
    CHECK(loaded.examples_per_language == result.scores.examples_per_language);
    for (const auto& lang : loaded.languages) {
        const auto& a = loaded.per_language.at(lang);
        const auto& b = result.scores.per_language.at(lang);
        CHECK(a.baseline_accuracy == b.baseline_accuracy);
        CHECK(a.baseline_scored == b.baseline_scored);
        CHECK(a.cell_accuracy.data == b.cell_accuracy.data);
        CHECK(a.scored_counts.data == b.scored_counts.data);
    }

    // a second save of the loaded matrix is byte-identical
    save_scores(loaded, tmp / "scores2.json");
    CHECK(testutil::read_file(tmp / "scores2.json") == text);
}

TEST_CASE("records round trip and keep 0-based indices with null baselines") {
    TempDir tmp;
    std::vector<RunRecord> records;
    RunRecord base;
    base.language = "en";
    base.alignment_id = "q1";
    base.generated_response = "resp";
    base.scored = true;
    base.score = 1;
    records.push_back(base);
    RunRecord cell = base;
    cell.layer = 0;
    cell.head = 2;
    cell.scored = false;
    cell.score = 0;
    cell.judge_error = "outage";
    records.push_back(cell);

    const auto path = tmp / "records.jsonl";
    save_records(records, path);
    const std::string text = testutil::read_file(path);
    CHECK(text.find("\"layer\":null") != std::string::npos);
    CHECK(text.find("\"layer\":0") != std::string::npos);
    CHECK(text.find("\"head\":2") != std::string::npos);

    const auto loaded = load_records(path);
    REQUIRE(loaded.size() == 2);
    CHECK_FALSE(loaded[0].layer.has_value());
    CHECK(loaded[0].scored);
    CHECK(loaded[1].layer == 0);
    CHECK(loaded[1].head == 2);
    CHECK_FALSE(loaded[1].scored);
    CHECK(loaded[1].judge_error == "outage");

    testutil::write_file(path, "{}\n");
    CHECK_THROWS_AS(load_records(path), HgError);
}

TEST_CASE("model responder truncates long prompts from the left") {
    // byte-alphabet copy model: position-keyed attention copies the token at
    // the attended (own) position; identity unembedding over the token block
    ModelConfig config;
    config.n_layers = 1;
    config.n_heads = 1;
    config.vocab_size = kByteVocabSize;
    config.max_seq_len = 16;
    config.d_model = kByteVocabSize + 16;
    config.d_head = config.d_model;

    Model model;
    model.config = config;
    ModelWeights& w = model.weights;
    w.token_embedding = Matrix(config.vocab_size, config.d_model);
    for (std::uint32_t t = 0; t < config.vocab_size; ++t) w.token_embedding.at(t, t) = 1.0f;
    w.position_embedding = Matrix(config.max_seq_len, config.d_model);
    for (std::uint32_t p = 0; p < config.max_seq_len; ++p) {
        w.position_embedding.at(p, kByteVocabSize + p) = 1.0f;
    }
    w.layers.resize(1);
    LayerWeights& lw = w.layers[0];
    lw.attn_norm_gain.assign(config.d_model, 1.0f);
    lw.attn_norm_bias.assign(config.d_model, 0.0f);
    lw.mlp_norm_gain.assign(config.d_model, 1.0f);
    lw.mlp_norm_bias.assign(config.d_model, 0.0f);
    lw.wq = Matrix(config.d_model, config.d_model);
    lw.wk = Matrix(config.d_model, config.d_model);
    lw.wv = Matrix(config.d_model, config.d_model);
    lw.wo = Matrix(config.d_model, config.d_model);
    for (std::uint32_t i = kByteVocabSize; i < config.d_model; ++i) {
        lw.wq.at(i, i) = 16.0f;
        lw.wk.at(i, i) = 16.0f;
    }
    for (std::uint32_t i = 0; i < kByteVocabSize; ++i) {
        lw.wv.at(i, i) = 1.0f;
        lw.wo.at(i, i) = 1.0f;
    }
    lw.w_up = Matrix(config.d_model, config.mlp_hidden());
    lw.w_down = Matrix(config.mlp_hidden(), config.d_model);
    w.final_norm_gain.assign(config.d_model, 1.0f);
    w.final_norm_bias.assign(config.d_model, 0.0f);
    w.unembedding = Matrix(config.d_model, config.vocab_size);
    for (std::uint32_t t = 0; t < config.vocab_size; ++t) w.unembedding.at(t, t) = 1.0f;

    ModelResponder responder(model, 4);
    AlignedExample ex;
    ex.alignment_id = "a";
    ex.language = "en";
    ex.passage = "this passage is much longer than eleven bytes";
    ex.question = "irrelevant?z";
    ex.ground_truth = "-";
    // budget = 16 - 4 - 1 = 11 prompt bytes, so only the tail survives and
    // the last prompt byte is 'z'; the copy model then repeats it
    const std::string out = responder.respond(ex, GateMask::all_on(config));
    CHECK(out == "zzzz");
}

TEST_CASE("model responder requires a byte-capable model") {
    const Model tiny = make_copy_model();  // vocab 8
    CHECK_THROWS_AS(ModelResponder(tiny, 2), HgError);

    Model fine = make_random_model(
        testutil::tiny_config(1, 1, 8, kByteVocabSize, 16), 3);
    CHECK_NOTHROW(ModelResponder(fine, 4));
    // no room for any prompt byte
    CHECK_THROWS_AS(ModelResponder(fine, 15), HgError);
}

TEST_CASE("model responder fingerprint follows the container digest") {
    TempDir tmp;
    Model model = make_random_model(testutil::tiny_config(1, 1, 8, kByteVocabSize, 16), 3);
    ModelResponder in_memory(model, 4);
    CHECK(in_memory.fingerprint() == "model:in-memory");

    save_model(model, tmp / "m.hgt");
    const Model loaded = load_model(tmp / "m.hgt");
    ModelResponder from_disk(loaded, 4);
    CHECK(from_disk.fingerprint() == "model:" + loaded.source_digest);
}
