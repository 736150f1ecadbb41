#include "model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "digest.hpp"
#include "error.hpp"

namespace headgate {

static_assert(std::endian::native == std::endian::little,
              "model container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'H', 'G', 'T', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr float kLayerNormEps = 1e-5f;

[[noreturn]] void fail(Err code, const std::string& msg) { throw HgError(code, msg); }

}  // namespace

void ModelConfig::validate() const {
    auto positive = [](const char* name, std::uint32_t v) {
        if (v == 0) fail(Err::Format, std::string("config field '") + name + "' must be positive");
    };
    positive("n_layers", n_layers);
    positive("n_heads", n_heads);
    positive("d_model", d_model);
    positive("d_head", d_head);
    positive("vocab_size", vocab_size);
    positive("max_seq_len", max_seq_len);
    if (d_model != n_heads * d_head) {
        std::ostringstream os;
        os << "config violates d_model = n_heads * d_head (" << d_model
           << " != " << n_heads << " * " << d_head << ")";
        fail(Err::Format, os.str());
    }
    if (max_seq_len < 2) fail(Err::Format, "config field 'max_seq_len' must be at least 2");
}

// ---------------------------------------------------------------------------
// GateMask
// ---------------------------------------------------------------------------

GateMask::GateMask(std::uint32_t n_layers, std::uint32_t n_heads)
    : n_layers_(n_layers), n_heads_(n_heads),
      gates_(static_cast<std::size_t>(n_layers) * n_heads, 1) {
    if (n_layers == 0 || n_heads == 0) fail(Err::Invalid, "gate mask dimensions must be positive");
}

GateMask GateMask::all_on(const ModelConfig& config) {
    return GateMask(config.n_layers, config.n_heads);
}

GateMask GateMask::from_bytes(std::span<const std::uint8_t> gates, std::uint32_t n_layers,
                              std::uint32_t n_heads) {
    GateMask mask(n_layers, n_heads);
    if (gates.size() != mask.gates_.size()) {
        std::ostringstream os;
        os << "gate mask has " << gates.size() << " entries, expected "
           << static_cast<std::size_t>(n_layers) * n_heads;
        fail(Err::Invalid, os.str());
    }
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (gates[i] > 1) fail(Err::Invalid, "gate mask entries must be 0 or 1");
        mask.gates_[i] = gates[i];
    }
    return mask;
}

void GateMask::set(std::uint32_t layer, std::uint32_t head, bool on) {
    if (layer >= n_layers_ || head >= n_heads_) fail(Err::Invalid, "gate index out of range");
    gates_[static_cast<std::size_t>(layer) * n_heads_ + head] = on ? 1 : 0;
}

bool GateMask::on(std::uint32_t layer, std::uint32_t head) const {
    if (layer >= n_layers_ || head >= n_heads_) fail(Err::Invalid, "gate index out of range");
    return gates_[static_cast<std::size_t>(layer) * n_heads_ + head] != 0;
}

std::span<const std::uint8_t> GateMask::row(std::uint32_t layer) const {
    if (layer >= n_layers_) fail(Err::Invalid, "gate layer index out of range");
    return {gates_.data() + static_cast<std::size_t>(layer) * n_heads_, n_heads_};
}

// ---------------------------------------------------------------------------
// Container I/O
// ---------------------------------------------------------------------------

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_tensor(std::ostream& out, std::span<const std::uint32_t> dims,
                  std::span<const float> data) {
    write_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (std::uint32_t d : dims) write_u32(out, d);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
}

std::uint32_t read_u32(std::istream& in, const char* context) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) fail(Err::Format, std::string("unexpected end of file while reading ") + context);
    return v;
}

void read_tensor(std::istream& in, const char* name, std::span<const std::uint32_t> expect_dims,
                 std::vector<float>& out) {
    const std::string where = std::string("tensor '") + name + "'";
    std::uint32_t ndims = read_u32(in, where.c_str());
    if (ndims != expect_dims.size()) {
        std::ostringstream os;
        os << where << ": expected " << expect_dims.size() << " dimensions, file has " << ndims;
        fail(Err::Format, os.str());
    }
    std::size_t count = 1;
    for (std::size_t i = 0; i < expect_dims.size(); ++i) {
        std::uint32_t d = read_u32(in, where.c_str());
        if (d != expect_dims[i]) {
            std::ostringstream os;
            os << where << " dimension " << i << ": expected " << expect_dims[i] << ", found "
               << d;
            fail(Err::Format, os.str());
        }
        count *= d;
    }
    out.resize(count);
    in.read(reinterpret_cast<char*>(out.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!in) fail(Err::Format, "unexpected end of file in " + where);
    for (float v : out) {
        if (!std::isfinite(v)) fail(Err::Format, where + " contains a non-finite value");
    }
}

void read_matrix(std::istream& in, const char* name, std::uint32_t rows, std::uint32_t cols,
                 Matrix& m) {
    m.rows = rows;
    m.cols = cols;
    std::uint32_t dims[2] = {rows, cols};
    read_tensor(in, name, dims, m.data);
}

void read_vec(std::istream& in, const char* name, std::uint32_t len, std::vector<float>& v) {
    std::uint32_t dims[1] = {len};
    read_tensor(in, name, dims, v);
}

void write_matrix(std::ostream& out, const Matrix& m) {
    std::uint32_t dims[2] = {static_cast<std::uint32_t>(m.rows),
                             static_cast<std::uint32_t>(m.cols)};
    write_tensor(out, dims, m.data);
}

void write_vec(std::ostream& out, std::span<const float> v) {
    std::uint32_t dims[1] = {static_cast<std::uint32_t>(v.size())};
    write_tensor(out, dims, v);
}

}  // namespace

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::NotFound, "model file not found: '" + path.string() + "'");

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        fail(Err::Format, "'" + path.string() + "' is not a model container (bad magic)");
    }
    const std::uint32_t version = read_u32(in, "format version");
    if (version != kFormatVersion) {
        std::ostringstream os;
        os << "unsupported container version " << version << " (expected " << kFormatVersion
           << ")";
        fail(Err::Format, os.str());
    }

    Model model;
    ModelConfig& c = model.config;
    c.n_layers = read_u32(in, "config.n_layers");
    c.n_heads = read_u32(in, "config.n_heads");
    c.d_model = read_u32(in, "config.d_model");
    c.d_head = read_u32(in, "config.d_head");
    c.vocab_size = read_u32(in, "config.vocab_size");
    c.max_seq_len = read_u32(in, "config.max_seq_len");
    c.validate();

    ModelWeights& w = model.weights;
    read_matrix(in, "token_embedding", c.vocab_size, c.d_model, w.token_embedding);
    read_matrix(in, "position_embedding", c.max_seq_len, c.d_model, w.position_embedding);
    w.layers.resize(c.n_layers);
    for (std::uint32_t l = 0; l < c.n_layers; ++l) {
        LayerWeights& lw = w.layers[l];
        const std::string p = "layers[" + std::to_string(l) + "].";
        read_vec(in, (p + "attn_norm_gain").c_str(), c.d_model, lw.attn_norm_gain);
        read_vec(in, (p + "attn_norm_bias").c_str(), c.d_model, lw.attn_norm_bias);
        read_matrix(in, (p + "wq").c_str(), c.d_model, c.d_model, lw.wq);
        read_matrix(in, (p + "wk").c_str(), c.d_model, c.d_model, lw.wk);
        read_matrix(in, (p + "wv").c_str(), c.d_model, c.d_model, lw.wv);
        read_matrix(in, (p + "wo").c_str(), c.d_model, c.d_model, lw.wo);
        read_vec(in, (p + "mlp_norm_gain").c_str(), c.d_model, lw.mlp_norm_gain);
        read_vec(in, (p + "mlp_norm_bias").c_str(), c.d_model, lw.mlp_norm_bias);
        read_matrix(in, (p + "w_up").c_str(), c.d_model, c.mlp_hidden(), lw.w_up);
        read_matrix(in, (p + "w_down").c_str(), c.mlp_hidden(), c.d_model, lw.w_down);
    }
    read_vec(in, "final_norm_gain", c.d_model, w.final_norm_gain);
    read_vec(in, "final_norm_bias", c.d_model, w.final_norm_bias);
    read_matrix(in, "unembedding", c.d_model, c.vocab_size, w.unembedding);

    in.peek();
    if (!in.eof()) fail(Err::Format, "trailing bytes after final tensor");

    model.source_digest = sha256_file_hex(path);
    return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    const ModelConfig& c = model.config;
    c.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::Io, "cannot open '" + path.string() + "' for writing");

    out.write(kMagic, 4);
    write_u32(out, kFormatVersion);
    write_u32(out, c.n_layers);
    write_u32(out, c.n_heads);
    write_u32(out, c.d_model);
    write_u32(out, c.d_head);
    write_u32(out, c.vocab_size);
    write_u32(out, c.max_seq_len);

    const ModelWeights& w = model.weights;
    write_matrix(out, w.token_embedding);
    write_matrix(out, w.position_embedding);
    for (const LayerWeights& lw : w.layers) {
        write_vec(out, lw.attn_norm_gain);
        write_vec(out, lw.attn_norm_bias);
        write_matrix(out, lw.wq);
        write_matrix(out, lw.wk);
        write_matrix(out, lw.wv);
        write_matrix(out, lw.wo);
        write_vec(out, lw.mlp_norm_gain);
        write_vec(out, lw.mlp_norm_bias);
        write_matrix(out, lw.w_up);
        write_matrix(out, lw.w_down);
    }
    write_vec(out, w.final_norm_gain);
    write_vec(out, w.final_norm_bias);
    write_matrix(out, w.unembedding);

    out.flush();
    if (!out) fail(Err::Io, "write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

namespace {

template <typename S>
void check_layer(std::size_t layer_index, const ModelConfig& config) {
    if (layer_index >= config.n_layers) fail(Err::Invalid, "layer index out of range");
}

template <typename S>
TMat<S> layer_norm(const TMat<S>& x, std::span<const float> gain, std::span<const float> bias) {
    TMat<S> out(x.rows, x.cols);
    const std::size_t d = x.cols;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const S* xi = x.row(i);
        S mean = 0;
        for (std::size_t j = 0; j < d; ++j) mean += xi[j];
        mean /= static_cast<S>(d);
        S var = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const S c = xi[j] - mean;
            var += c * c;
        }
        var /= static_cast<S>(d);
        const S inv = S(1) / std::sqrt(var + static_cast<S>(kLayerNormEps));
        S* oi = out.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            oi[j] = (xi[j] - mean) * inv * static_cast<S>(gain[j]) + static_cast<S>(bias[j]);
        }
    }
    return out;
}

template <typename S>
S gelu(S v) {
    return S(0.5) * v * (S(1) + std::erf(v / std::sqrt(S(2))));
}

// out = x (rows x inner) * w (inner x cols)
template <typename S>
TMat<S> matmul(const TMat<S>& x, const Matrix& w) {
    TMat<S> out(x.rows, w.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const S* xi = x.row(i);
        S* oi = out.row(i);
        for (std::size_t j = 0; j < w.cols; ++j) {
            S acc = 0;
            for (std::size_t t = 0; t < w.rows; ++t) acc += xi[t] * static_cast<S>(w.at(t, j));
            oi[j] = acc;
        }
    }
    return out;
}

// Gated multi-head attention over an already-normalized input. A null gate
// pointer means the gating code is absent; gate entries of 1 take the exact
// same arithmetic path.
template <typename S>
TMat<S> attention_impl(const TMat<S>& x, std::size_t layer_index, const ModelConfig& config,
                       const ModelWeights& weights, const std::uint8_t* gate_row) {
    const std::size_t seq = x.rows;
    const std::size_t dm = config.d_model;
    const std::size_t dh = config.d_head;
    const LayerWeights& lw = weights.layers[layer_index];
    if (x.cols != dm) fail(Err::Invalid, "attention input width does not match d_model");

    TMat<S> out(seq, dm);
    const S scale = S(1) / std::sqrt(static_cast<S>(dh));

    TMat<S> q(seq, dh), k(seq, dh), v(seq, dh);
    std::vector<S> probs(seq), ctx(dh);

    for (std::size_t h = 0; h < config.n_heads; ++h) {
        if (gate_row != nullptr && gate_row[h] == 0) continue;
        const std::size_t off = h * dh;

        for (std::size_t i = 0; i < seq; ++i) {
            const S* xi = x.row(i);
            for (std::size_t j = 0; j < dh; ++j) {
                S aq = 0, ak = 0, av = 0;
                for (std::size_t t = 0; t < dm; ++t) {
                    const S xv = xi[t];
                    aq += xv * static_cast<S>(lw.wq.at(t, off + j));
                    ak += xv * static_cast<S>(lw.wk.at(t, off + j));
                    av += xv * static_cast<S>(lw.wv.at(t, off + j));
                }
                q.at(i, j) = aq;
                k.at(i, j) = ak;
                v.at(i, j) = av;
            }
        }

        for (std::size_t i = 0; i < seq; ++i) {
            // causal scores for positions 0..i, stable softmax
            S max_score = -std::numeric_limits<S>::infinity();
            for (std::size_t j = 0; j <= i; ++j) {
                S s = 0;
                for (std::size_t c = 0; c < dh; ++c) s += q.at(i, c) * k.at(j, c);
                s *= scale;
                probs[j] = s;
                if (s > max_score) max_score = s;
            }
            S denom = 0;
            for (std::size_t j = 0; j <= i; ++j) {
                probs[j] = std::exp(probs[j] - max_score);
                denom += probs[j];
            }
            for (std::size_t c = 0; c < dh; ++c) ctx[c] = 0;
            for (std::size_t j = 0; j <= i; ++j) {
                const S p = probs[j] / denom;
                for (std::size_t c = 0; c < dh; ++c) ctx[c] += p * v.at(j, c);
            }
            // this head's slice of the output projection, added to the sum
            S* oi = out.row(i);
            for (std::size_t t = 0; t < dm; ++t) {
                S acc = 0;
                for (std::size_t c = 0; c < dh; ++c) {
                    acc += ctx[c] * static_cast<S>(lw.wo.at(off + c, t));
                }
                oi[t] += acc;
            }
        }
    }
    return out;
}

template <typename S>
TMat<S> mlp(const TMat<S>& x, const LayerWeights& lw) {
    TMat<S> hidden = matmul(x, lw.w_up);
    for (S& v : hidden.data) v = gelu(v);
    return matmul(hidden, lw.w_down);
}

template <typename S>
void validate_tokens(std::span<const TokenId> tokens, const ModelConfig& config) {
    if (tokens.empty()) fail(Err::Invalid, "token sequence must be non-empty");
    if (tokens.size() > config.max_seq_len) {
        std::ostringstream os;
        os << "sequence length " << tokens.size() << " exceeds max_seq_len "
           << config.max_seq_len;
        fail(Err::Invalid, os.str());
    }
    for (TokenId t : tokens) {
        if (t >= config.vocab_size) fail(Err::Invalid, "token id out of vocabulary range");
    }
}

template <typename S>
TMat<S> embed(std::span<const TokenId> tokens, const ModelConfig& config,
              const ModelWeights& weights) {
    TMat<S> x(tokens.size(), config.d_model);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const float* tok = weights.token_embedding.row(tokens[i]);
        const float* pos = weights.position_embedding.row(i);
        S* xi = x.row(i);
        for (std::size_t j = 0; j < config.d_model; ++j) {
            xi[j] = static_cast<S>(tok[j]) + static_cast<S>(pos[j]);
        }
    }
    return x;
}

template <typename S>
void add_in_place(TMat<S>& x, const TMat<S>& delta) {
    for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += delta.data[i];
}

// One pre-norm block: x += attention(norm(x)); x += mlp(norm(x)).
template <typename S>
void layer_step(TMat<S>& x, std::size_t layer_index, const ModelConfig& config,
                const ModelWeights& weights, const std::uint8_t* gate_row) {
    const LayerWeights& lw = weights.layers[layer_index];
    TMat<S> normed = layer_norm(x, lw.attn_norm_gain, lw.attn_norm_bias);
    TMat<S> attn = attention_impl(normed, layer_index, config, weights, gate_row);
    add_in_place(x, attn);
    TMat<S> normed2 = layer_norm(x, lw.mlp_norm_gain, lw.mlp_norm_bias);
    TMat<S> ffn = mlp(normed2, lw);
    add_in_place(x, ffn);
}

template <typename S>
TMat<S> forward_impl(std::span<const TokenId> tokens, const GateMask* mask,
                     const ModelConfig& config, const ModelWeights& weights,
                     ForwardTrace* trace) {
    validate_tokens<S>(tokens, config);
    if (mask != nullptr &&
        (mask->n_layers() != config.n_layers || mask->n_heads() != config.n_heads)) {
        fail(Err::Invalid, "gate mask shape does not match model dimensions");
    }
    TMat<S> x = embed<S>(tokens, config, weights);
    for (std::size_t l = 0; l < config.n_layers; ++l) {
        const std::uint8_t* gate_row =
            mask != nullptr ? mask->row(static_cast<std::uint32_t>(l)).data() : nullptr;
        layer_step(x, l, config, weights, gate_row);
        if (trace != nullptr) {
            if constexpr (std::is_same_v<S, float>) {
                trace->residual_after_layer.push_back(x);
            }
        }
    }
    TMat<S> normed = layer_norm(x, weights.final_norm_gain, weights.final_norm_bias);
    return matmul(normed, weights.unembedding);
}

}  // namespace

// ---------------------------------------------------------------------------
// Public inference surface
// ---------------------------------------------------------------------------

template <typename Scalar>
TMat<Scalar> gated_attention_t(const TMat<Scalar>& layer_input, std::size_t layer_index,
                               const ModelConfig& config, const ModelWeights& weights,
                               std::span<const std::uint8_t> gate_row) {
    check_layer<Scalar>(layer_index, config);
    if (gate_row.size() != config.n_heads) {
        std::ostringstream os;
        os << "gate row has " << gate_row.size() << " entries, model has " << config.n_heads
           << " heads";
        fail(Err::Invalid, os.str());
    }
    for (std::uint8_t g : gate_row) {
        if (g > 1) fail(Err::Invalid, "gate entries must be 0 or 1");
    }
    return attention_impl(layer_input, layer_index, config, weights, gate_row.data());
}

template <typename Scalar>
TMat<Scalar> ungated_attention_t(const TMat<Scalar>& layer_input, std::size_t layer_index,
                                 const ModelConfig& config, const ModelWeights& weights) {
    check_layer<Scalar>(layer_index, config);
    return attention_impl(layer_input, layer_index, config, weights, nullptr);
}

template <typename Scalar>
TMat<Scalar> attention_input_t(std::span<const TokenId> tokens, std::size_t layer_index,
                               const ModelConfig& config, const ModelWeights& weights) {
    check_layer<Scalar>(layer_index, config);
    validate_tokens<Scalar>(tokens, config);
    TMat<Scalar> x = embed<Scalar>(tokens, config, weights);
    for (std::size_t l = 0; l < layer_index; ++l) layer_step(x, l, config, weights, nullptr);
    const LayerWeights& lw = weights.layers[layer_index];
    return layer_norm(x, lw.attn_norm_gain, lw.attn_norm_bias);
}

// Deliberately its own straight-line computation (full score matrix, then
// softmax, then context, then projection) so the additivity tests compare two
// separately written paths.
template <typename Scalar>
TMat<Scalar> head_contribution_t(std::span<const TokenId> tokens, std::size_t layer_index,
                                 std::size_t head_index, const ModelConfig& config,
                                 const ModelWeights& weights) {
    using S = Scalar;
    check_layer<S>(layer_index, config);
    if (head_index >= config.n_heads) fail(Err::Invalid, "head index out of range");

    const TMat<S> x = attention_input_t<S>(tokens, layer_index, config, weights);
    const std::size_t seq = x.rows;
    const std::size_t dm = config.d_model;
    const std::size_t dh = config.d_head;
    const std::size_t off = head_index * dh;
    const LayerWeights& lw = weights.layers[layer_index];

    TMat<S> q(seq, dh), k(seq, dh), v(seq, dh);
    for (std::size_t i = 0; i < seq; ++i) {
        for (std::size_t j = 0; j < dh; ++j) {
            S aq = 0, ak = 0, av = 0;
            for (std::size_t t = 0; t < dm; ++t) {
                aq += x.at(i, t) * static_cast<S>(lw.wq.at(t, off + j));
                ak += x.at(i, t) * static_cast<S>(lw.wk.at(t, off + j));
                av += x.at(i, t) * static_cast<S>(lw.wv.at(t, off + j));
            }
            q.at(i, j) = aq;
            k.at(i, j) = ak;
            v.at(i, j) = av;
        }
    }

    const S scale = S(1) / std::sqrt(static_cast<S>(dh));
    TMat<S> scores(seq, seq);
    for (std::size_t i = 0; i < seq; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            S s = 0;
            for (std::size_t c = 0; c < dh; ++c) s += q.at(i, c) * k.at(j, c);
            scores.at(i, j) = s * scale;
        }
    }

    TMat<S> weights_mat(seq, seq);
    for (std::size_t i = 0; i < seq; ++i) {
        S max_score = scores.at(i, 0);
        for (std::size_t j = 1; j <= i; ++j) max_score = std::max(max_score, scores.at(i, j));
        S denom = 0;
        for (std::size_t j = 0; j <= i; ++j) {
            weights_mat.at(i, j) = std::exp(scores.at(i, j) - max_score);
            denom += weights_mat.at(i, j);
        }
        for (std::size_t j = 0; j <= i; ++j) weights_mat.at(i, j) /= denom;
    }

    TMat<S> ctx(seq, dh);
    for (std::size_t i = 0; i < seq; ++i) {
        for (std::size_t c = 0; c < dh; ++c) {
            S acc = 0;
            for (std::size_t j = 0; j <= i; ++j) acc += weights_mat.at(i, j) * v.at(j, c);
            ctx.at(i, c) = acc;
        }
    }

    TMat<S> out(seq, dm);
    for (std::size_t i = 0; i < seq; ++i) {
        for (std::size_t t = 0; t < dm; ++t) {
            S acc = 0;
            for (std::size_t c = 0; c < dh; ++c) {
                acc += ctx.at(i, c) * static_cast<S>(lw.wo.at(off + c, t));
            }
            out.at(i, t) = acc;
        }
    }
    return out;
}

template TMat<float> gated_attention_t<float>(const TMat<float>&, std::size_t,
                                              const ModelConfig&, const ModelWeights&,
                                              std::span<const std::uint8_t>);
template TMat<double> gated_attention_t<double>(const TMat<double>&, std::size_t,
                                                const ModelConfig&, const ModelWeights&,
                                                std::span<const std::uint8_t>);
template TMat<float> ungated_attention_t<float>(const TMat<float>&, std::size_t,
                                                const ModelConfig&, const ModelWeights&);
template TMat<double> ungated_attention_t<double>(const TMat<double>&, std::size_t,
                                                  const ModelConfig&, const ModelWeights&);
template TMat<float> head_contribution_t<float>(std::span<const TokenId>, std::size_t,
                                                std::size_t, const ModelConfig&,
                                                const ModelWeights&);
template TMat<double> head_contribution_t<double>(std::span<const TokenId>, std::size_t,
                                                  std::size_t, const ModelConfig&,
                                                  const ModelWeights&);
template TMat<float> attention_input_t<float>(std::span<const TokenId>, std::size_t,
                                              const ModelConfig&, const ModelWeights&);
template TMat<double> attention_input_t<double>(std::span<const TokenId>, std::size_t,
                                                const ModelConfig&, const ModelWeights&);

Matrix gated_attention(const Matrix& layer_input, std::size_t layer_index,
                       const ModelConfig& config, const ModelWeights& weights,
                       std::span<const std::uint8_t> gate_row) {
    return gated_attention_t<float>(layer_input, layer_index, config, weights, gate_row);
}

Matrix ungated_attention(const Matrix& layer_input, std::size_t layer_index,
                         const ModelConfig& config, const ModelWeights& weights) {
    return ungated_attention_t<float>(layer_input, layer_index, config, weights);
}

Matrix head_contribution(std::span<const TokenId> tokens, std::size_t layer_index,
                         std::size_t head_index, const ModelConfig& config,
                         const ModelWeights& weights) {
    return head_contribution_t<float>(tokens, layer_index, head_index, config, weights);
}

Matrix forward(std::span<const TokenId> tokens, const GateMask& gate_mask,
               const ModelConfig& config, const ModelWeights& weights, ForwardTrace* trace) {
    return forward_impl<float>(tokens, &gate_mask, config, weights, trace);
}

Matrix forward_ungated(std::span<const TokenId> tokens, const ModelConfig& config,
                       const ModelWeights& weights, ForwardTrace* trace) {
    return forward_impl<float>(tokens, nullptr, config, weights, trace);
}

std::vector<TokenId> generate(std::span<const TokenId> prompt, const GateMask& gate_mask,
                              std::size_t max_new_tokens, std::int64_t eos_token,
                              const ModelConfig& config, const ModelWeights& weights) {
    if (prompt.empty()) fail(Err::Invalid, "prompt must be non-empty");
    if (prompt.size() + max_new_tokens > config.max_seq_len) {
        std::ostringstream os;
        os << "context overflow: prompt (" << prompt.size() << ") + max_new_tokens ("
           << max_new_tokens << ") exceeds max_seq_len " << config.max_seq_len;
        fail(Err::Invalid, os.str());
    }

    std::vector<TokenId> tokens(prompt.begin(), prompt.end());
    std::vector<TokenId> suffix;
    for (std::size_t step = 0; step < max_new_tokens; ++step) {
        const Matrix logits = forward(tokens, gate_mask, config, weights);
        const float* last = logits.row(logits.rows - 1);
        std::size_t best = 0;
        for (std::size_t t = 1; t < config.vocab_size; ++t) {
            // strict > keeps the lowest token id on ties
            if (last[t] > last[best]) best = t;
        }
        const TokenId next = static_cast<TokenId>(best);
        if (eos_token >= 0 && static_cast<std::int64_t>(next) == eos_token) break;
        suffix.push_back(next);
        tokens.push_back(next);
    }
    return suffix;
}

}  // namespace headgate
