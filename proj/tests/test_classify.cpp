#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "classify.hpp"
#include "error.hpp"
#include "helpers.hpp"

using namespace headgate;
using testutil::TempDir;

namespace {

// 2x2 grid over en/hi with chosen deltas; baseline accuracy 0.8 everywhere.
ScoreMatrix grid_with_deltas(const std::vector<std::vector<std::pair<double, double>>>& deltas) {
    ScoreMatrix matrix;
    matrix.layers = {19, 20};
    matrix.heads = {4, 5};
    matrix.languages = {"en", "hi"};
    matrix.examples_per_language = 10;
    for (const std::string& lang : matrix.languages) {
        LanguageScores scores;
        scores.baseline_accuracy = 0.8;
        scores.baseline_scored = 10;
        scores.cell_accuracy = TMat<double>(2, 2);
        scores.scored_counts = TMat<std::uint32_t>(2, 2);
        for (std::size_t l = 0; l < 2; ++l) {
            for (std::size_t h = 0; h < 2; ++h) {
                const auto& [en_delta, hi_delta] = deltas[l][h];
                scores.cell_accuracy.at(l, h) = 0.8 + (lang == "en" ? en_delta : hi_delta);
                scores.scored_counts.at(l, h) = 10;
            }
        }
        matrix.per_language.emplace(lang, std::move(scores));
    }
    return matrix;
}

}  // namespace

TEST_CASE("compute_deltas is cell accuracy minus baseline, 1-based labels") {
    const ScoreMatrix matrix = grid_with_deltas({
        {{-0.3, 0.0}, {0.1, 0.1}},
        {{0.0, 0.0}, {-0.05, 0.2}},
    });
    const std::vector<HeadDelta> deltas = compute_deltas(matrix);
    REQUIRE(deltas.size() == 4);
    // layer-major, labels are internal + 1
    CHECK(deltas[0].layer_label == 20);
    CHECK(deltas[0].head_label == 5);
    CHECK(deltas[1].head_label == 6);
    CHECK(deltas[2].layer_label == 21);
    CHECK(deltas[0].delta.at("en") == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(deltas[0].delta.at("hi") == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(deltas[3].delta.at("en") == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(deltas[3].delta.at("hi") == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("classify_head applies the S-set rule") {
    ClassifyConfig config;
    config.threshold = 0.1;
    const std::vector<std::string> langs = {"en", "hi"};

    HeadDelta d;
    d.layer_label = 20;
    d.head_label = 5;

    SUBCASE("no language reaches the threshold: miscellaneous") {
        d.delta = {{"en", 0.05}, {"hi", -0.09}};
        const HeadClass c = classify_head(d, langs, config);
        CHECK(c.kind == HeadClassKind::Miscellaneous);
        CHECK(c.languages.empty());
    }

    SUBCASE("exactly one language: language-specific") {
        d.delta = {{"en", -0.25}, {"hi", 0.0}};
        const HeadClass c = classify_head(d, langs, config);
        CHECK(c.kind == HeadClassKind::LanguageSpecific);
        CHECK(c.languages == std::vector<std::string>{"en"});
    }

    SUBCASE("positive deltas count through the absolute value") {
        d.delta = {{"en", 0.12}, {"hi", 0.0}};
        const HeadClass c = classify_head(d, langs, config);
        CHECK(c.kind == HeadClassKind::LanguageSpecific);
        CHECK(c.languages == std::vector<std::string>{"en"});
    }

    SUBCASE("every language: language-agnostic") {
        d.delta = {{"en", -0.2}, {"hi", -0.11}};
        const HeadClass c = classify_head(d, langs, config);
        CHECK(c.kind == HeadClassKind::LanguageAgnostic);
        CHECK(c.languages == std::vector<std::string>{"en", "hi"});
    }

    SUBCASE("threshold is inclusive") {
        d.delta = {{"en", 0.1}, {"hi", -0.1}};
        const HeadClass c = classify_head(d, langs, config);
        CHECK(c.kind == HeadClassKind::LanguageAgnostic);
    }

    SUBCASE("a proper multi-language subset is agnostic over that subset") {
        const std::vector<std::string> three = {"en", "hi", "ar"};
        d.delta = {{"en", -0.2}, {"hi", -0.15}, {"ar", 0.01}};
        const HeadClass c = classify_head(d, three, config);
        CHECK(c.kind == HeadClassKind::LanguageAgnostic);
        CHECK(c.languages == std::vector<std::string>{"en", "hi"});
    }

    SUBCASE("missing language is an error") {
        d.delta = {{"en", -0.2}};
        CHECK_THROWS_AS(classify_head(d, langs, config), HgError);
    }
}

TEST_CASE("classify config validation") {
    ClassifyConfig config;
    config.threshold = 0.5;
    CHECK_NOTHROW(config.validate());
    config.threshold = 0.0;
    CHECK_THROWS_AS(config.validate(), HgError);
    config.threshold = 1.0;
    CHECK_THROWS_AS(config.validate(), HgError);
    config.threshold = -0.1;
    CHECK_THROWS_AS(config.validate(), HgError);
    config.threshold = 1e-9;
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("classify_all produces one classified head per cell") {
    const ScoreMatrix matrix = grid_with_deltas({
        {{-0.3, 0.0}, {0.0, -0.4}},
        {{-0.2, -0.2}, {0.01, 0.01}},
    });
    ClassifyConfig config;
    config.threshold = 0.1;
    const Classification result = classify_all(matrix, config);

    CHECK(result.languages == std::vector<std::string>{"en", "hi"});
    CHECK(result.threshold == 0.1);
    REQUIRE(result.heads.size() == 4);

    CHECK(result.heads[0].head_class.kind == HeadClassKind::LanguageSpecific);
    CHECK(result.heads[0].head_class.languages == std::vector<std::string>{"en"});
    CHECK(result.heads[1].head_class.kind == HeadClassKind::LanguageSpecific);
    CHECK(result.heads[1].head_class.languages == std::vector<std::string>{"hi"});
    CHECK(result.heads[2].head_class.kind == HeadClassKind::LanguageAgnostic);
    CHECK(result.heads[3].head_class.kind == HeadClassKind::Miscellaneous);
}

TEST_CASE("classification JSON round trip") {
    TempDir tmp;
    const ScoreMatrix matrix = grid_with_deltas({
        {{-0.3, 0.0}, {0.0, -0.4}},
        {{-0.2, -0.2}, {0.01, 0.01}},
    });
    ClassifyConfig config;
    config.threshold = 0.1;
    const Classification result = classify_all(matrix, config);

    const auto path = tmp / "classification.json";
    save_classification(result, path);
    const std::string text = testutil::read_file(path);
    CHECK(text.find("\"language_specific\"") != std::string::npos);
    CHECK(text.find("\"language_agnostic\"") != std::string::npos);
    CHECK(text.find("\"miscellaneous\"") != std::string::npos);
    CHECK(text.find("\"layer\": 20") != std::string::npos);

    const Classification loaded = load_classification(path);
    CHECK(loaded.languages == result.languages);
    CHECK(loaded.threshold == result.threshold);
    REQUIRE(loaded.heads.size() == result.heads.size());
    for (std::size_t i = 0; i < loaded.heads.size(); ++i) {
        CHECK(loaded.heads[i].delta.layer_label == result.heads[i].delta.layer_label);
        CHECK(loaded.heads[i].delta.head_label == result.heads[i].delta.head_label);
        CHECK(loaded.heads[i].head_class.kind == result.heads[i].head_class.kind);
        CHECK(loaded.heads[i].head_class.languages == result.heads[i].head_class.languages);
        for (const auto& [lang, value] : result.heads[i].delta.delta) {
            CHECK(loaded.heads[i].delta.delta.at(lang) == value);
        }
    }

    save_classification(loaded, tmp / "again.json");
    CHECK(testutil::read_file(tmp / "again.json") == text);
}

TEST_CASE("relabeling languages permutes the classification") {
    const ScoreMatrix matrix = grid_with_deltas({
        {{-0.3, 0.0}, {0.0, -0.4}},
        {{-0.2, -0.2}, {0.05, 0.0}},
    });
    ScoreMatrix swapped = matrix;
    swapped.languages = {"hi", "en"};
    swapped.per_language.clear();
    swapped.per_language.emplace("hi", matrix.per_language.at("en"));
    swapped.per_language.emplace("en", matrix.per_language.at("hi"));

    ClassifyConfig config;
    config.threshold = 0.1;
    const Classification a = classify_all(matrix, config);
    const Classification b = classify_all(swapped, config);

    auto rename = [](std::vector<std::string> langs) {
        for (std::string& l : langs) l = (l == "en") ? "hi" : "en";
        std::sort(langs.begin(), langs.end());
        return langs;
    };
    REQUIRE(a.heads.size() == b.heads.size());
    for (std::size_t i = 0; i < a.heads.size(); ++i) {
        CHECK(a.heads[i].head_class.kind == b.heads[i].head_class.kind);
        auto expect = rename(a.heads[i].head_class.languages);
        auto got = b.heads[i].head_class.languages;
        std::sort(got.begin(), got.end());
        CHECK(got == expect);
    }
}
