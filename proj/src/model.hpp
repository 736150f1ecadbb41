#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace headgate {

using TokenId = std::uint32_t;

// Passing this as `eos_token` disables end-of-sequence stopping.
inline constexpr std::int64_t kNoEosToken = -1;

struct ModelConfig {
    std::uint32_t n_layers = 0;
    std::uint32_t n_heads = 0;
    std::uint32_t d_model = 0;
    std::uint32_t d_head = 0;
    std::uint32_t vocab_size = 0;
    std::uint32_t max_seq_len = 0;

    // The MLP hidden width is fixed by convention, not stored in the container.
    std::uint32_t mlp_hidden() const { return 4 * d_model; }

    // Throws Err::Format naming the violated constraint.
    void validate() const;

    bool operator==(const ModelConfig&) const = default;
};

struct LayerWeights {
    std::vector<float> attn_norm_gain, attn_norm_bias;  // d_model
    Matrix wq, wk, wv, wo;                              // d_model x d_model
    std::vector<float> mlp_norm_gain, mlp_norm_bias;    // d_model
    Matrix w_up;                                        // d_model x 4*d_model
    Matrix w_down;                                      // 4*d_model x d_model
};

struct ModelWeights {
    Matrix token_embedding;     // vocab_size x d_model
    Matrix position_embedding;  // max_seq_len x d_model
    std::vector<LayerWeights> layers;
    std::vector<float> final_norm_gain, final_norm_bias;  // d_model
    Matrix unembedding;  // d_model x vocab_size
};

struct Model {
    ModelConfig config;
    ModelWeights weights;
    // SHA-256 of the container this model was loaded from; empty for models
    // built in memory.
    std::string source_digest;
};

// Per-(layer, head) binary gates. 1 leaves the head's contribution in the
// attention sum, 0 removes it.
class GateMask {
  public:
    GateMask(std::uint32_t n_layers, std::uint32_t n_heads);  // all gates on

    static GateMask all_on(const ModelConfig& config);

    // Validates that every entry of `gates` (row-major n_layers x n_heads) is
    // 0 or 1.
    static GateMask from_bytes(std::span<const std::uint8_t> gates, std::uint32_t n_layers,
                               std::uint32_t n_heads);

    void set(std::uint32_t layer, std::uint32_t head, bool on);
    bool on(std::uint32_t layer, std::uint32_t head) const;

    std::span<const std::uint8_t> row(std::uint32_t layer) const;
    std::uint32_t n_layers() const { return n_layers_; }
    std::uint32_t n_heads() const { return n_heads_; }

  private:
    std::uint32_t n_layers_, n_heads_;
    std::vector<std::uint8_t> gates_;
};

// ---------------------------------------------------------------------------
// Container I/O. Single little-endian file:
//   magic "HGT1" | u32 version (=1)
//   u32 n_layers, n_heads, d_model, d_head, vocab_size, max_seq_len
//   tensors in a fixed order, each as: u32 ndims | u32 dims[ndims] | f32 data
// Tensor order: token_embedding [vocab, d_model]; position_embedding
// [max_seq, d_model]; per layer: attn_norm_gain, attn_norm_bias [d_model],
// wq, wk, wv, wo [d_model, d_model], mlp_norm_gain, mlp_norm_bias [d_model],
// w_up [d_model, 4*d_model], w_down [4*d_model, d_model]; then
// final_norm_gain, final_norm_bias [d_model]; unembedding [d_model, vocab].
// Dims are stored so a loader can say which tensor and which dimension is
// wrong; data is raw row-major f32 with no padding.
// ---------------------------------------------------------------------------

Model load_model(const std::filesystem::path& path);

// Fixture writer; tests and the `fixture` CLI command round-trip through it.
void save_model(const Model& model, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Inference. All functions are pure: same arguments, bit-identical results.
// The gated attention output is the sum over heads h of
//   gate[h] * (per-head scaled dot-product attention, projected through that
//   head's slice of the output projection),
// with causal masking. Heads whose gate is 0 contribute nothing; with every
// gate 1 the arithmetic is identical to the ungated functions.
//
// The Scalar template parameter is the oracle precision switch: float is the
// production path, double reruns identical math with 64-bit storage and
// accumulation for tight additivity checks. Weights stay f32 and are widened
// on read.
// ---------------------------------------------------------------------------

template <typename Scalar>
TMat<Scalar> gated_attention_t(const TMat<Scalar>& layer_input, std::size_t layer_index,
                               const ModelConfig& config, const ModelWeights& weights,
                               std::span<const std::uint8_t> gate_row);

template <typename Scalar>
TMat<Scalar> ungated_attention_t(const TMat<Scalar>& layer_input, std::size_t layer_index,
                                 const ModelConfig& config, const ModelWeights& weights);

// The Att_h term of one head in isolation: prefix-forwards `tokens` without
// gating to obtain the layer's normalized attention input, then computes that
// single head's attention and its slice of the output projection.
template <typename Scalar>
TMat<Scalar> head_contribution_t(std::span<const TokenId> tokens, std::size_t layer_index,
                                 std::size_t head_index, const ModelConfig& config,
                                 const ModelWeights& weights);

// The normalized attention input of one layer under an ungated prefix; the
// `x` that gated_attention consumes inside forward.
template <typename Scalar>
TMat<Scalar> attention_input_t(std::span<const TokenId> tokens, std::size_t layer_index,
                               const ModelConfig& config, const ModelWeights& weights);

// f32 production aliases.
Matrix gated_attention(const Matrix& layer_input, std::size_t layer_index,
                       const ModelConfig& config, const ModelWeights& weights,
                       std::span<const std::uint8_t> gate_row);
Matrix ungated_attention(const Matrix& layer_input, std::size_t layer_index,
                         const ModelConfig& config, const ModelWeights& weights);
Matrix head_contribution(std::span<const TokenId> tokens, std::size_t layer_index,
                         std::size_t head_index, const ModelConfig& config,
                         const ModelWeights& weights);

// Optional capture of the residual stream for prefix-isolation checks.
struct ForwardTrace {
    // residual_after_layer[l] is the residual stream after layer l completes.
    std::vector<Matrix> residual_after_layer;
};

// Full pass: embeddings, then per layer pre-norm gated attention and pre-norm
// GELU MLP with residual adds, final norm, unembedding. Returns logits
// (seq x vocab_size).
Matrix forward(std::span<const TokenId> tokens, const GateMask& gate_mask,
               const ModelConfig& config, const ModelWeights& weights,
               ForwardTrace* trace = nullptr);

// Same pass with the gating code absent rather than all-ones.
Matrix forward_ungated(std::span<const TokenId> tokens, const ModelConfig& config,
                       const ModelWeights& weights, ForwardTrace* trace = nullptr);

// Greedy decoding: at each step take the lowest token id among the argmax
// logits, stop on `eos_token` or after max_new_tokens. Returns only the
// generated suffix.
std::vector<TokenId> generate(std::span<const TokenId> prompt, const GateMask& gate_mask,
                              std::size_t max_new_tokens, std::int64_t eos_token,
                              const ModelConfig& config, const ModelWeights& weights);

}  // namespace headgate
