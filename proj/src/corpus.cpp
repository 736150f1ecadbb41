#include "corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace headgate {

using nlohmann::json;

const AlignedExample& AlignedCorpus::get(const std::string& alignment_id,
                                         const std::string& language) const {
    auto group = examples.find(alignment_id);
    if (group == examples.end()) {
        throw HgError(Err::NotFound, "unknown alignment_id '" + alignment_id + "'");
    }
    auto ex = group->second.find(language);
    if (ex == group->second.end()) {
        throw HgError(Err::NotFound,
                      "alignment_id '" + alignment_id + "' has no '" + language + "' example");
    }
    return ex->second;
}

namespace {

std::string require_string(const json& obj, const char* field, std::size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        std::ostringstream os;
        os << "line " << line_no << ": missing field '" << field << "'";
        throw HgError(Err::Format, os.str());
    }
    if (!it->is_string() || it->get<std::string>().empty()) {
        std::ostringstream os;
        os << "line " << line_no << ": field '" << field << "' must be a non-empty string";
        throw HgError(Err::Format, os.str());
    }
    return it->get<std::string>();
}

}  // namespace

AlignedCorpus load_corpus(const std::filesystem::path& path,
                          const std::vector<std::string>& languages) {
    if (languages.empty()) throw HgError(Err::Config, "no languages configured");
    {
        std::set<std::string> seen;
        for (const std::string& lang : languages) {
            if (lang.empty()) throw HgError(Err::Config, "empty language code");
            if (!seen.insert(lang).second) {
                throw HgError(Err::Config, "duplicate language code '" + lang + "'");
            }
        }
    }

    std::ifstream in(path);
    if (!in) throw HgError(Err::NotFound, "corpus file not found: '" + path.string() + "'");

    AlignedCorpus corpus;
    corpus.languages = languages;

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
            os << "line " << line_no << ": " << e.what();
            throw HgError(Err::Format, os.str());
        }
        if (!obj.is_object()) {
            std::ostringstream os;
            os << "line " << line_no << ": expected a JSON object";
            throw HgError(Err::Format, os.str());
        }

        AlignedExample ex;
        ex.alignment_id = require_string(obj, "alignment_id", line_no);
        ex.language = require_string(obj, "language", line_no);
        ex.passage = require_string(obj, "passage", line_no);
        ex.question = require_string(obj, "question", line_no);
        ex.ground_truth = require_string(obj, "ground_truth", line_no);

        if (std::find(languages.begin(), languages.end(), ex.language) == languages.end()) {
            continue;
        }

        const std::string id = ex.alignment_id;
        const std::string lang = ex.language;
        auto [group, inserted] = corpus.examples.try_emplace(id);
        if (inserted) corpus.alignment_ids.push_back(id);
        if (!group->second.emplace(lang, std::move(ex)).second) {
            std::ostringstream os;
            os << "line " << line_no << ": duplicate example for alignment_id '" << id
               << "' language '" << lang << "'";
            throw HgError(Err::Format, os.str());
        }
    }

    if (corpus.alignment_ids.empty()) {
        throw HgError(Err::Format,
                      "corpus '" + path.string() + "' contains no examples in the configured "
                      "languages");
    }

    std::vector<std::string> holes;
    for (const std::string& id : corpus.alignment_ids) {
        const auto& group = corpus.examples.at(id);
        for (const std::string& lang : languages) {
            if (!group.contains(lang)) holes.push_back(id + ": missing " + lang);
        }
    }
    if (!holes.empty()) {
        std::ostringstream os;
        os << "corpus is not fully aligned (" << holes.size() << " holes):";
        for (const std::string& h : holes) os << "\n  " << h;
        throw HgError(Err::Format, os.str());
    }

    return corpus;
}

void save_corpus(const AlignedCorpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw HgError(Err::Io, "cannot open '" + path.string() + "' for writing");
    for (const std::string& id : corpus.alignment_ids) {
        const auto& group = corpus.examples.at(id);
        for (const std::string& lang : corpus.languages) {
            const AlignedExample& ex = group.at(lang);
            nlohmann::ordered_json obj;
            obj["alignment_id"] = ex.alignment_id;
            obj["language"] = ex.language;
            obj["passage"] = ex.passage;
            obj["question"] = ex.question;
            obj["ground_truth"] = ex.ground_truth;
            out << obj.dump() << '\n';
        }
    }
    out.flush();
    if (!out) throw HgError(Err::Io, "write failed for '" + path.string() + "'");
}

std::string build_prompt(const AlignedExample& example) {
    std::string prompt =
        "Refer to the passage below and then answer the question afterwards in the same "
        "language as the passage:";
    prompt += "\n\nPassage: ";
    prompt += example.passage;
    prompt += "\n\nQuestion: ";
    prompt += example.question;
    return prompt;
}

AlignedCorpus subset(const AlignedCorpus& corpus, std::size_t n, std::uint64_t seed) {
    if (n > corpus.size()) {
        std::ostringstream os;
        os << "subset size " << n << " exceeds corpus size " << corpus.size();
        throw HgError(Err::Invalid, os.str());
    }
    std::vector<std::string> shuffled = corpus.alignment_ids;
    SplitMix64 rng(seed);
    seeded_shuffle(shuffled, rng);

    std::set<std::string> keep(shuffled.begin(), shuffled.begin() + static_cast<long>(n));

    AlignedCorpus out;
    out.languages = corpus.languages;
    for (const std::string& id : corpus.alignment_ids) {
        if (!keep.contains(id)) continue;
        out.alignment_ids.push_back(id);
        out.examples.emplace(id, corpus.examples.at(id));
    }
    return out;
}

}  // namespace headgate
