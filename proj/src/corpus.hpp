#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace headgate {

struct AlignedExample {
    std::string alignment_id;
    std::string language;  // ISO 639-1 code
    std::string passage;
    std::string question;
    std::string ground_truth;
};

// Parallel QA corpus: every alignment_id carries one example per configured
// language, so per-language accuracies compare the same questions.
struct AlignedCorpus {
    std::vector<std::string> languages;      // configured order
    std::vector<std::string> alignment_ids;  // file order, stable across loads
    // alignment_id -> language -> example
    std::map<std::string, std::map<std::string, AlignedExample>> examples;

    std::size_t size() const { return alignment_ids.size(); }
    const AlignedExample& get(const std::string& alignment_id, const std::string& language) const;
};

// JSONL, one object per line with fields alignment_id, language, passage,
// question, ground_truth. Lines in languages outside `languages` are ignored.
// Errors carry the 1-based line number; an alignment violation lists every
// (alignment_id, language) hole.
AlignedCorpus load_corpus(const std::filesystem::path& path,
                          const std::vector<std::string>& languages);

// Inverse of load_corpus up to field order; load(save(c)) == c.
void save_corpus(const AlignedCorpus& corpus, const std::filesystem::path& path);

// Byte-stable evaluation prompt; the instruction line stays English for every
// language.
std::string build_prompt(const AlignedExample& example);

// Deterministic selection of n whole alignment groups. Ids are shuffled with
// SplitMix64(seed), the first n taken, then put back in the corpus's original
// order, so n == size() returns an identical corpus.
AlignedCorpus subset(const AlignedCorpus& corpus, std::size_t n, std::uint64_t seed);

}  // namespace headgate
