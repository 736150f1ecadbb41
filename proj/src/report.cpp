#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace headgate {

using nlohmann::ordered_json;

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

const LanguageScores& scores_for(const ScoreMatrix& matrix, const HeatmapSpec& spec) {
    auto it = matrix.per_language.find(spec.language);
    if (it == matrix.per_language.end()) {
        throw HgError(Err::Invalid,
                      "heatmap language '" + spec.language + "' is not in the score matrix");
    }
    return it->second;
}

double cell_value(const LanguageScores& ls, const HeatmapSpec& spec, std::size_t r,
                  std::size_t c) {
    const double acc = ls.cell_accuracy.at(r, c);
    return spec.mode == HeatmapMode::Accuracy ? acc : acc - ls.baseline_accuracy;
}

std::pair<double, double> color_bounds(const ScoreMatrix& matrix, const LanguageScores& ls,
                                       const HeatmapSpec& spec) {
    if (spec.low.has_value() && spec.high.has_value()) {
        if (!(*spec.low < *spec.high)) {
            throw HgError(Err::Invalid, "heatmap color bounds must be ordered");
        }
        return {*spec.low, *spec.high};
    }
    const std::size_t rows = matrix.layers.count();
    const std::size_t cols = matrix.heads.count();
    if (spec.mode == HeatmapMode::Accuracy) {
        double lo = cell_value(ls, spec, 0, 0);
        double hi = lo;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double v = cell_value(ls, spec, r, c);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        return {lo, hi};
    }
    double m = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m = std::max(m, std::abs(cell_value(ls, spec, r, c)));
        }
    }
    if (m == 0.0) m = 0.5;
    return {-m, m};
}

// low -> red (192, 57, 43), high -> green (39, 174, 96)
std::string lerp_fill(double v, double lo, double hi) {
    double t = (v - lo) / (hi - lo);
    t = std::clamp(t, 0.0, 1.0);
    const long r = std::lround(192.0 + (39.0 - 192.0) * t);
    const long g = std::lround(57.0 + (174.0 - 57.0) * t);
    const long b = std::lround(43.0 + (96.0 - 43.0) * t);
    char buf[24];
    std::snprintf(buf, sizeof buf, "rgb(%ld,%ld,%ld)", r, g, b);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string heatmap_csv(const ScoreMatrix& matrix, const HeatmapSpec& spec) {
    const LanguageScores& ls = scores_for(matrix, spec);
    std::string out = "layer";
    for (std::uint32_t h = matrix.heads.first; h <= matrix.heads.last; ++h) {
        out += ',';
        out += std::to_string(h + 1);
    }
    out += '\n';
    for (std::uint32_t l = matrix.layers.first; l <= matrix.layers.last; ++l) {
        out += std::to_string(l + 1);
        for (std::uint32_t h = matrix.heads.first; h <= matrix.heads.last; ++h) {
            out += ',';
            out += fixed4(cell_value(ls, spec, l - matrix.layers.first, h - matrix.heads.first));
        }
        out += '\n';
    }
    return out;
}

ParsedHeatmap parse_heatmap_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw HgError(Err::Format, "heatmap CSV is empty");

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = s.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(s.substr(start));
                break;
            }
            fields.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
        return fields;
    };
    auto parse_u32 = [](const std::string& s, const char* what) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<std::uint32_t>(v);
        } catch (const std::exception&) {
            throw HgError(Err::Format, std::string("heatmap CSV: bad ") + what + " '" + s + "'");
        }
    };

    ParsedHeatmap parsed;
    const std::vector<std::string> header = split(line);
    if (header.size() < 2 || header[0] != "layer") {
        throw HgError(Err::Format, "heatmap CSV header must start with 'layer'");
    }
    for (std::size_t i = 1; i < header.size(); ++i) {
        parsed.head_labels.push_back(parse_u32(header[i], "head label"));
    }

    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != header.size()) {
            throw HgError(Err::Format, "heatmap CSV row width does not match header");
        }
        parsed.layer_labels.push_back(parse_u32(fields[0], "layer label"));
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(fields[i], &used));
                if (used != fields[i].size()) throw std::invalid_argument(fields[i]);
            } catch (const std::exception&) {
                throw HgError(Err::Format, "heatmap CSV: bad value '" + fields[i] + "'");
            }
        }
    }
    if (parsed.layer_labels.empty()) throw HgError(Err::Format, "heatmap CSV has no rows");

    parsed.values = TMat<double>(parsed.layer_labels.size(), parsed.head_labels.size());
    parsed.values.data = std::move(values);
    return parsed;
}

std::string heatmap_svg(const ScoreMatrix& matrix, const HeatmapSpec& spec) {
    const LanguageScores& ls = scores_for(matrix, spec);
    const auto [lo, hi] = color_bounds(matrix, ls, spec);

    const int cell_w = 30, cell_h = 22;
    const int margin_left = 46, margin_top = 44;
    const int rows = static_cast<int>(matrix.layers.count());
    const int cols = static_cast<int>(matrix.heads.count());
    const int width = margin_left + cols * cell_w + 10;
    const int height = margin_top + rows * cell_h + 10;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <style>text { font-family: sans-serif; font-size: 11px; fill: #333; }</style>\n";
    const char* mode_label =
        spec.mode == HeatmapMode::Accuracy ? "accuracy" : "delta vs baseline";
    svg << "  <text x=\"" << margin_left << "\" y=\"16\">" << xml_escape(spec.language) << " "
        << mode_label << " (scale " << fixed4(lo) << " to " << fixed4(hi) << ")</text>\n";

    for (int c = 0; c < cols; ++c) {
        const std::uint32_t label = matrix.heads.first + static_cast<std::uint32_t>(c) + 1;
        svg << "  <text x=\"" << margin_left + c * cell_w + cell_w / 2 << "\" y=\"36\" "
            << "text-anchor=\"middle\">" << label << "</text>\n";
    }
    for (int r = 0; r < rows; ++r) {
        const std::uint32_t label = matrix.layers.first + static_cast<std::uint32_t>(r) + 1;
        svg << "  <text x=\"" << margin_left - 6 << "\" y=\""
            << margin_top + r * cell_h + cell_h / 2 + 4 << "\" text-anchor=\"end\">" << label
            << "</text>\n";
    }

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v =
                cell_value(ls, spec, static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            svg << "  <rect x=\"" << margin_left + c * cell_w << "\" y=\""
                << margin_top + r * cell_h << "\" width=\"" << cell_w << "\" height=\""
                << cell_h << "\" fill=\"" << lerp_fill(v, lo, hi)
                << "\" stroke=\"#ffffff\" stroke-width=\"1\">";
            svg << "<title>L" << matrix.layers.first + static_cast<std::uint32_t>(r) + 1 << " H"
                << matrix.heads.first + static_cast<std::uint32_t>(c) + 1 << ": " << fixed4(v)
                << "</title></rect>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::map<std::string, std::string> taxonomy_tables(const Classification& classification) {
    std::vector<const ClassifiedHead*> sorted;
    sorted.reserve(classification.heads.size());
    for (const ClassifiedHead& head : classification.heads) sorted.push_back(&head);
    std::sort(sorted.begin(), sorted.end(), [](const ClassifiedHead* a, const ClassifiedHead* b) {
        if (a->delta.layer_label != b->delta.layer_label) {
            return a->delta.layer_label < b->delta.layer_label;
        }
        return a->delta.head_label < b->delta.head_label;
    });

    const std::string header = "Layer\tHead Number\n";
    std::map<std::string, std::string> tables;
    tables["heads_miscellaneous.txt"] = header;
    tables["heads_language_agnostic.txt"] = header;
    for (const std::string& lang : classification.languages) {
        tables["heads_specific_" + lang + ".txt"] = header;
    }

    for (const ClassifiedHead* head : sorted) {
        std::string file;
        switch (head->head_class.kind) {
            case HeadClassKind::Miscellaneous:
                file = "heads_miscellaneous.txt";
                break;
            case HeadClassKind::LanguageAgnostic:
                file = "heads_language_agnostic.txt";
                break;
            case HeadClassKind::LanguageSpecific:
                file = "heads_specific_" + head->head_class.languages.at(0) + ".txt";
                break;
        }
        tables.at(file) += std::to_string(head->delta.layer_label) + "\t" +
                           std::to_string(head->delta.head_label) + "\n";
    }
    return tables;
}

std::vector<QualitativeDiff> qualitative_diffs(const std::vector<RunRecord>& records,
                                               const AlignedCorpus& corpus) {
    struct Group {
        const RunRecord* baseline = nullptr;
        std::vector<const RunRecord*> cells;
    };
    std::map<std::pair<std::string, std::string>, Group> groups;
    std::vector<std::pair<std::string, std::string>> order;

    for (const RunRecord& r : records) {
        const auto key = std::make_pair(r.language, r.alignment_id);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        if (r.layer.has_value()) {
            it->second.cells.push_back(&r);
        } else {
            it->second.baseline = &r;
        }
    }

    std::vector<QualitativeDiff> diffs;
    for (const auto& key : order) {
        const Group& group = groups.at(key);
        if (group.cells.empty()) continue;
        if (group.baseline == nullptr) {
            throw HgError(Err::Format, "no baseline record for alignment_id '" + key.second +
                                           "' language '" + key.first + "'");
        }
        if (!group.baseline->scored) continue;  // no baseline verdict to differ from

        QualitativeDiff diff;
        for (const RunRecord* cell : group.cells) {
            if (!cell->scored || cell->score == group.baseline->score) continue;
            diff.cells.push_back(
                MaskedDiffCell{*cell->layer + 1, *cell->head + 1, cell->generated_response});
        }
        if (diff.cells.empty()) continue;
        std::sort(diff.cells.begin(), diff.cells.end(),
                  [](const MaskedDiffCell& a, const MaskedDiffCell& b) {
                      if (a.layer_label != b.layer_label) return a.layer_label < b.layer_label;
                      return a.head_label < b.head_label;
                  });

        const AlignedExample& ex = corpus.get(key.second, key.first);
        diff.alignment_id = key.second;
        diff.language = key.first;
        diff.question = ex.question;
        diff.ground_truth = ex.ground_truth;
        diff.baseline_response = group.baseline->generated_response;
        diff.baseline_score = group.baseline->score;
        diff.direction = group.baseline->score == 1 ? DiffDirection::CorrectToWrong
                                                    : DiffDirection::WrongToCorrect;
        diffs.push_back(std::move(diff));
    }
    return diffs;
}

std::string qualitative_diffs_json(const std::vector<QualitativeDiff>& diffs) {
    ordered_json doc = ordered_json::array();
    for (const QualitativeDiff& diff : diffs) {
        ordered_json obj;
        obj["alignment_id"] = diff.alignment_id;
        obj["language"] = diff.language;
        obj["question"] = diff.question;
        obj["ground_truth"] = diff.ground_truth;
        obj["baseline_response"] = diff.baseline_response;
        obj["baseline_score"] = diff.baseline_score;
        obj["direction"] = diff.direction == DiffDirection::CorrectToWrong ? "CorrectToWrong"
                                                                           : "WrongToCorrect";
        ordered_json cells = ordered_json::array();
        for (const MaskedDiffCell& cell : diff.cells) {
            ordered_json c;
            c["layer"] = cell.layer_label;
            c["head"] = cell.head_label;
            c["masked_response"] = cell.masked_response;
            cells.push_back(std::move(c));
        }
        obj["cells"] = std::move(cells);
        doc.push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

}  // namespace headgate
