#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sweep.hpp"

namespace headgate {

// Signed effect of masking one head, per language. Labels are 1-based like
// every report surface.
struct HeadDelta {
    std::uint32_t layer_label = 0;
    std::uint32_t head_label = 0;
    std::map<std::string, double> delta;  // cell_accuracy - baseline_accuracy
};

enum class HeadClassKind { LanguageSpecific, LanguageAgnostic, Miscellaneous };

struct HeadClass {
    HeadClassKind kind = HeadClassKind::Miscellaneous;
    // The S set of languages whose |delta| reached the threshold: empty for
    // Miscellaneous, exactly one for LanguageSpecific, two or more for
    // LanguageAgnostic (all languages, or a proper subset when k > 2).
    std::vector<std::string> languages;
};

struct ClassifyConfig {
    // Minimum |delta| that counts as "making contribution". The conventional
    // default is 1/examples_per_language, one example's worth of accuracy.
    double threshold = 0.0;

    void validate() const;
};

struct ClassifiedHead {
    HeadDelta delta;
    HeadClass head_class;
};

struct Classification {
    std::vector<std::string> languages;
    double threshold = 0.0;
    std::vector<ClassifiedHead> heads;  // layer-major, ascending
};

// One HeadDelta per swept cell, layer-major.
std::vector<HeadDelta> compute_deltas(const ScoreMatrix& matrix);

// S-set rule: S = {L : |delta_L| >= threshold}. Empty -> Miscellaneous;
// singleton {L} -> LanguageSpecific(L); everything else -> LanguageAgnostic
// over S. `languages` fixes which languages must be present in the delta.
HeadClass classify_head(const HeadDelta& delta, const std::vector<std::string>& languages,
                        const ClassifyConfig& config);

Classification classify_all(const ScoreMatrix& matrix, const ClassifyConfig& config);

void save_classification(const Classification& classification,
                         const std::filesystem::path& path);
Classification load_classification(const std::filesystem::path& path);

}  // namespace headgate
