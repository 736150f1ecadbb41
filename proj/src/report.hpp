#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "classify.hpp"
#include "corpus.hpp"
#include "sweep.hpp"

namespace headgate {

enum class HeatmapMode { Accuracy, DeltaVsBaseline };

struct HeatmapSpec {
    std::string language;
    HeatmapMode mode = HeatmapMode::Accuracy;
    // Color scale bounds; unset means automatic (matrix min/max in Accuracy
    // mode, symmetric +-max|delta| in Delta mode).
    std::optional<double> low;
    std::optional<double> high;
};

// CSV grid: header "layer,<head labels...>", one row per layer, every value
// fixed at 4 decimals. Parsing an emitted grid recovers exactly those
// 4-decimal values.
std::string heatmap_csv(const ScoreMatrix& matrix, const HeatmapSpec& spec);

struct ParsedHeatmap {
    std::vector<std::uint32_t> layer_labels;
    std::vector<std::uint32_t> head_labels;
    TMat<double> values;
};

ParsedHeatmap parse_heatmap_csv(const std::string& csv);

// Deterministic standalone SVG: one rect per cell, fill interpolated linearly
// from red (low) to green (high), 1-based axis labels.
std::string heatmap_svg(const ScoreMatrix& matrix, const HeatmapSpec& spec);

// One table per class, formatted like the taxonomy tables: a "Layer\tHead
// Number" header and one row per head, layer then head ascending. Keys are
// the output file names: heads_miscellaneous.txt, heads_language_agnostic.txt
// and heads_specific_{lang}.txt per language.
std::map<std::string, std::string> taxonomy_tables(const Classification& classification);

struct MaskedDiffCell {
    std::uint32_t layer_label = 0;
    std::uint32_t head_label = 0;
    std::string masked_response;
};

enum class DiffDirection { CorrectToWrong, WrongToCorrect };

// One example whose verdict flips under some masks: the baseline response
// plus every (layer, head) whose scored verdict differs from the baseline's.
struct QualitativeDiff {
    std::string alignment_id;
    std::string language;
    std::string question;
    std::string ground_truth;
    std::string baseline_response;
    int baseline_score = 0;
    DiffDirection direction = DiffDirection::CorrectToWrong;
    std::vector<MaskedDiffCell> cells;  // (layer, head) ascending
};

// Records must contain a scored baseline for every (language, alignment_id)
// that any cell record references. Unscored records never contribute.
// `corpus` supplies question and ground truth text.
std::vector<QualitativeDiff> qualitative_diffs(const std::vector<RunRecord>& records,
                                               const AlignedCorpus& corpus);

std::string qualitative_diffs_json(const std::vector<QualitativeDiff>& diffs);

}  // namespace headgate
