#include "classify.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace headgate {

using nlohmann::json;
using nlohmann::ordered_json;

void ClassifyConfig::validate() const {
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        std::ostringstream os;
        os << "classification threshold must lie in (0, 1), got " << threshold;
        throw HgError(Err::Config, os.str());
    }
}

std::vector<HeadDelta> compute_deltas(const ScoreMatrix& matrix) {
    std::vector<HeadDelta> deltas;
    deltas.reserve(static_cast<std::size_t>(matrix.layers.count()) * matrix.heads.count());
    for (std::uint32_t l = matrix.layers.first; l <= matrix.layers.last; ++l) {
        for (std::uint32_t h = matrix.heads.first; h <= matrix.heads.last; ++h) {
            HeadDelta d;
            d.layer_label = l + 1;
            d.head_label = h + 1;
            for (const std::string& lang : matrix.languages) {
                const LanguageScores& ls = matrix.per_language.at(lang);
                const std::size_t r = l - matrix.layers.first;
                const std::size_t c = h - matrix.heads.first;
                d.delta[lang] = ls.cell_accuracy.at(r, c) - ls.baseline_accuracy;
            }
            deltas.push_back(std::move(d));
        }
    }
    return deltas;
}

HeadClass classify_head(const HeadDelta& delta, const std::vector<std::string>& languages,
                        const ClassifyConfig& config) {
    config.validate();
    if (languages.empty()) throw HgError(Err::Config, "no languages to classify over");

    std::vector<std::string> contributing;
    for (const std::string& lang : languages) {
        auto it = delta.delta.find(lang);
        if (it == delta.delta.end()) {
            std::ostringstream os;
            os << "head (" << delta.layer_label << ", " << delta.head_label
               << ") has no delta for language '" << lang << "'";
            throw HgError(Err::Invalid, os.str());
        }
        if (std::abs(it->second) >= config.threshold) contributing.push_back(lang);
    }

    HeadClass cls;
    cls.languages = std::move(contributing);
    if (cls.languages.empty()) {
        cls.kind = HeadClassKind::Miscellaneous;
    } else if (cls.languages.size() == 1) {
        cls.kind = HeadClassKind::LanguageSpecific;
    } else {
        cls.kind = HeadClassKind::LanguageAgnostic;
    }
    return cls;
}

Classification classify_all(const ScoreMatrix& matrix, const ClassifyConfig& config) {
    config.validate();
    Classification out;
    out.languages = matrix.languages;
    out.threshold = config.threshold;
    for (HeadDelta& d : compute_deltas(matrix)) {
        ClassifiedHead head;
        head.head_class = classify_head(d, matrix.languages, config);
        head.delta = std::move(d);
        out.heads.push_back(std::move(head));
    }
    return out;
}

namespace {

const char* kind_to_string(HeadClassKind kind) {
    switch (kind) {
        case HeadClassKind::LanguageSpecific: return "language_specific";
        case HeadClassKind::LanguageAgnostic: return "language_agnostic";
        case HeadClassKind::Miscellaneous: return "miscellaneous";
    }
    return "miscellaneous";
}

HeadClassKind kind_from_string(const std::string& s) {
    if (s == "language_specific") return HeadClassKind::LanguageSpecific;
    if (s == "language_agnostic") return HeadClassKind::LanguageAgnostic;
    if (s == "miscellaneous") return HeadClassKind::Miscellaneous;
    throw HgError(Err::Format, "unknown head class '" + s + "'");
}

}  // namespace

void save_classification(const Classification& classification,
                         const std::filesystem::path& path) {
    ordered_json doc;
    doc["threshold"] = classification.threshold;
    doc["languages"] = classification.languages;
    ordered_json heads = ordered_json::array();
    for (const ClassifiedHead& head : classification.heads) {
        ordered_json obj;
        obj["layer"] = head.delta.layer_label;
        obj["head"] = head.delta.head_label;
        ordered_json deltas = ordered_json::object();
        for (const std::string& lang : classification.languages) {
            deltas[lang] = head.delta.delta.at(lang);
        }
        obj["deltas"] = std::move(deltas);
        obj["class"] = kind_to_string(head.head_class.kind);
        obj["class_languages"] = head.head_class.languages;
        heads.push_back(std::move(obj));
    }
    doc["heads"] = std::move(heads);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw HgError(Err::Io, "cannot open '" + path.string() + "' for writing");
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) throw HgError(Err::Io, "write failed for '" + path.string() + "'");
}

Classification load_classification(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw HgError(Err::NotFound, "classification file not found: '" + path.string() + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw HgError(Err::Format, "classification file '" + path.string() + "': " + e.what());
    }

    Classification out;
    try {
        out.threshold = doc.at("threshold").get<double>();
        out.languages = doc.at("languages").get<std::vector<std::string>>();
        for (const json& obj : doc.at("heads")) {
            ClassifiedHead head;
            head.delta.layer_label = obj.at("layer").get<std::uint32_t>();
            head.delta.head_label = obj.at("head").get<std::uint32_t>();
            for (const std::string& lang : out.languages) {
                head.delta.delta[lang] = obj.at("deltas").at(lang).get<double>();
            }
            head.head_class.kind = kind_from_string(obj.at("class").get<std::string>());
            head.head_class.languages =
                obj.at("class_languages").get<std::vector<std::string>>();
            out.heads.push_back(std::move(head));
        }
    } catch (const json::exception& e) {
        throw HgError(Err::Format, "classification file '" + path.string() + "': " + e.what());
    }
    return out;
}

}  // namespace headgate
