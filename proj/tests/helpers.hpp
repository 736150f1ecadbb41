#pragma once

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "judge.hpp"
#include "model.hpp"
#include "sweep.hpp"

namespace testutil {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "headgate-test-XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline headgate::ModelConfig tiny_config(std::uint32_t n_layers, std::uint32_t n_heads,
                                         std::uint32_t d_head, std::uint32_t vocab_size = 32,
                                         std::uint32_t max_seq_len = 16) {
    headgate::ModelConfig config;
    config.n_layers = n_layers;
    config.n_heads = n_heads;
    config.d_head = d_head;
    config.d_model = n_heads * d_head;
    config.vocab_size = vocab_size;
    config.max_seq_len = max_seq_len;
    return config;
}

// Scripted responder for sweep tests: instant, deterministic, and able to
// react to which gate is off.
class StubResponder final : public headgate::Responder {
  public:
    using Fn = std::function<std::string(const headgate::AlignedExample&,
                                         const headgate::GateMask&)>;

    StubResponder(std::uint32_t n_layers, std::uint32_t n_heads, std::string fingerprint, Fn fn)
        : n_layers_(n_layers),
          n_heads_(n_heads),
          fingerprint_(std::move(fingerprint)),
          fn_(std::move(fn)) {}

    std::uint32_t n_layers() const override { return n_layers_; }
    std::uint32_t n_heads() const override { return n_heads_; }
    std::string fingerprint() const override { return fingerprint_; }
    std::string respond(const headgate::AlignedExample& example,
                        const headgate::GateMask& mask) override {
        return fn_(example, mask);
    }

  private:
    std::uint32_t n_layers_;
    std::uint32_t n_heads_;
    std::string fingerprint_;
    Fn fn_;
};

// Echoes the ground truth, so every verdict under an exact judge is 1 unless
// the script says otherwise.
inline StubResponder::Fn echo_truth() {
    return [](const headgate::AlignedExample& example, const headgate::GateMask&) {
        return example.ground_truth;
    };
}

class ScriptedJudge final : public headgate::Judge {
  public:
    // Return 0/1 to score; throw to leave the example unscored.
    using Fn = std::function<int(const headgate::AlignedExample&, const std::string&)>;

    ScriptedJudge(std::string fingerprint, Fn fn)
        : fingerprint_(std::move(fingerprint)), fn_(std::move(fn)) {}

    headgate::JudgeVerdict judge(const headgate::AlignedExample& example,
                                 const std::string& response) override {
        headgate::JudgeVerdict verdict;
        verdict.alignment_id = example.alignment_id;
        verdict.language = example.language;
        verdict.score = fn_(example, response);
        return verdict;
    }
    std::string fingerprint() const override { return fingerprint_; }

  private:
    std::string fingerprint_;
    Fn fn_;
};

// n aligned ids across the given languages, all fields distinct per example.
inline headgate::AlignedCorpus make_grid_corpus(std::size_t n,
                                                const std::vector<std::string>& languages) {
    headgate::AlignedCorpus corpus;
    corpus.languages = languages;
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "q" + std::to_string(i + 1);
        corpus.alignment_ids.push_back(id);
        for (const std::string& lang : languages) {
            headgate::AlignedExample ex;
            ex.alignment_id = id;
            ex.language = lang;
            ex.passage = "passage " + id + " " + lang;
            ex.question = "question " + id + " " + lang;
            ex.ground_truth = "truth " + id + " " + lang;
            corpus.examples[id][lang] = ex;
        }
    }
    return corpus;
}

}  // namespace testutil
