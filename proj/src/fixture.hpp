#pragma once

#include <cstdint>
#include <filesystem>

#include "corpus.hpp"
#include "model.hpp"

namespace headgate {

// Random tiny model with every weight in [-1, 1]: projections uniform in
// +-1/sqrt(d_model), embeddings uniform in +-0.5, norm gains near 1. Small
// enough that activations stay tame through a handful of layers.
Model make_random_model(const ModelConfig& config, std::uint64_t seed);

// Hand-wired single-head model whose attention provably attends only to the
// current position and copies its token identity into the logits, so greedy
// generation repeats the last prompt token forever. d_model = 16: dims 0..7
// one-hot token identity (vocab 8), dims 8..15 one-hot position (max_seq 8).
// The query/key projections map the position block to itself scaled by 16,
// which saturates the softmax: the off-diagonal attention weights underflow
// to exactly 0 in 32-bit floats. The MLP weights are zero and the value/
// output projections pass the token block through unchanged.
Model make_copy_model();

// Small aligned en/hi corpus with byte-friendly content; used by the fixture
// command and as a convenient test corpus.
AlignedCorpus make_demo_corpus();

// Writes model.hgt (random, byte vocabulary), corpus.jsonl, and a ready-to-run
// config.json into dir. Paths inside the config are relative, so commands
// should run from dir.
void write_fixture_dir(const std::filesystem::path& dir, std::uint64_t seed,
                       std::uint32_t n_layers, std::uint32_t n_heads, std::uint32_t d_head,
                       std::uint32_t max_seq_len, std::uint32_t max_new_tokens);

}  // namespace headgate
