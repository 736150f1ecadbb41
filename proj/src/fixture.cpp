#include "fixture.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "tokenizer.hpp"

namespace headgate {

namespace {

double unit_double(SplitMix64& rng) {
    // 53 uniform bits in [0, 1)
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

float uniform(SplitMix64& rng, double lo, double hi) {
    return static_cast<float>(lo + (hi - lo) * unit_double(rng));
}

void fill_uniform(Matrix& m, std::size_t rows, std::size_t cols, SplitMix64& rng, double lo,
                  double hi) {
    m = Matrix(rows, cols);
    for (float& v : m.data) v = uniform(rng, lo, hi);
}

void fill_uniform(std::vector<float>& v, std::size_t n, SplitMix64& rng, double lo, double hi) {
    v.resize(n);
    for (float& x : v) x = uniform(rng, lo, hi);
}

}  // namespace

Model make_random_model(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    SplitMix64 rng(seed);
    const double s = 1.0 / std::sqrt(static_cast<double>(config.d_model));

    Model model;
    model.config = config;
    ModelWeights& w = model.weights;
    fill_uniform(w.token_embedding, config.vocab_size, config.d_model, rng, -0.5, 0.5);
    fill_uniform(w.position_embedding, config.max_seq_len, config.d_model, rng, -0.5, 0.5);
    w.layers.resize(config.n_layers);
    for (LayerWeights& lw : w.layers) {
        fill_uniform(lw.attn_norm_gain, config.d_model, rng, 0.8, 1.2);
        fill_uniform(lw.attn_norm_bias, config.d_model, rng, -0.1, 0.1);
        fill_uniform(lw.wq, config.d_model, config.d_model, rng, -s, s);
        fill_uniform(lw.wk, config.d_model, config.d_model, rng, -s, s);
        fill_uniform(lw.wv, config.d_model, config.d_model, rng, -s, s);
        fill_uniform(lw.wo, config.d_model, config.d_model, rng, -s, s);
        fill_uniform(lw.mlp_norm_gain, config.d_model, rng, 0.8, 1.2);
        fill_uniform(lw.mlp_norm_bias, config.d_model, rng, -0.1, 0.1);
        fill_uniform(lw.w_up, config.d_model, config.mlp_hidden(), rng, -s, s);
        fill_uniform(lw.w_down, config.mlp_hidden(), config.d_model, rng, -s, s);
    }
    fill_uniform(w.final_norm_gain, config.d_model, rng, 0.8, 1.2);
    fill_uniform(w.final_norm_bias, config.d_model, rng, -0.1, 0.1);
    fill_uniform(w.unembedding, config.d_model, config.vocab_size, rng, -s, s);
    return model;
}

Model make_copy_model() {
    Model model;
    ModelConfig& c = model.config;
    c.n_layers = 1;
    c.n_heads = 1;
    c.d_model = 16;
    c.d_head = 16;
    c.vocab_size = 8;
    c.max_seq_len = 8;
    c.validate();

    ModelWeights& w = model.weights;
    w.token_embedding = Matrix(c.vocab_size, c.d_model);
    for (std::uint32_t t = 0; t < c.vocab_size; ++t) w.token_embedding.at(t, t) = 1.0f;
    w.position_embedding = Matrix(c.max_seq_len, c.d_model);
    for (std::uint32_t p = 0; p < c.max_seq_len; ++p) w.position_embedding.at(p, 8 + p) = 1.0f;

    w.layers.resize(1);
    LayerWeights& lw = w.layers[0];
    lw.attn_norm_gain.assign(c.d_model, 1.0f);
    lw.attn_norm_bias.assign(c.d_model, 0.0f);
    lw.wq = Matrix(c.d_model, c.d_model);
    lw.wk = Matrix(c.d_model, c.d_model);
    const float saturate = 16.0f;
    for (std::size_t d = 8; d < 16; ++d) {
        lw.wq.at(d, d) = saturate;
        lw.wk.at(d, d) = saturate;
    }
    lw.wv = Matrix(c.d_model, c.d_model);
    lw.wo = Matrix(c.d_model, c.d_model);
    for (std::size_t d = 0; d < 8; ++d) {
        lw.wv.at(d, d) = 1.0f;
        lw.wo.at(d, d) = 1.0f;
    }
    lw.mlp_norm_gain.assign(c.d_model, 1.0f);
    lw.mlp_norm_bias.assign(c.d_model, 0.0f);
    lw.w_up = Matrix(c.d_model, c.mlp_hidden());
    lw.w_down = Matrix(c.mlp_hidden(), c.d_model);

    w.final_norm_gain.assign(c.d_model, 1.0f);
    w.final_norm_bias.assign(c.d_model, 0.0f);
    w.unembedding = Matrix(c.d_model, c.vocab_size);
    for (std::uint32_t t = 0; t < c.vocab_size; ++t) w.unembedding.at(t, t) = 1.0f;
    return model;
}

AlignedCorpus make_demo_corpus() {
    struct Item {
        const char* id;
        const char* passage_en;
        const char* question_en;
        const char* truth_en;
        const char* passage_hi;
        const char* question_hi;
        const char* truth_hi;
    };
    const Item items[] = {
        {"q1", "The Ganges rises in the Himalayas and flows into the Bay of Bengal.",
         "Where does the Ganges rise?", "the Himalayas",
         "गंगा हिमालय से "
         "निकलती है और बं"
         "गाल की खाड़ी में "
         "गिरती है।",
         "गंगा कहाँ से नि"
         "कलती है?",
         "हिमालय"},
        {"q2", "Copper conducts electricity better than iron.",
         "Which metal conducts electricity better, copper or iron?", "copper",
         "तांबा लोहे से बे"
         "हतर बिजली का सं"
         "चालन करता है।",
         "तांबा या लोहा, कौ"
         "न बेहतर संवाहक "
         "है?",
         "तांबा"},
        {"q3", "The treaty was signed in 1923 in Lausanne.",
         "In which year was the treaty signed?", "1923",
         "संधि पर 1923 में लोज"
         "़ान में हस्ताक्"
         "षर हुए।",
         "संधि पर किस वर्ष "
         "हस्ताक्षर हुए?",
         "1923"},
        {"q4", "Uranium compounds vary widely in how soluble they are in water.",
         "What property of uranium compounds varies widely?", "solubility",
         "यूरेनियम यौगिक "
         "पानी में घुलनशी"
         "लता में बहुत भिन"
         "्न होते हैं।",
         "यूरेनियम यौगिक"
         "ों का कौन सा गुण "
         "भिन्न होता है?",
         "घुलनशीलता"},
    };

    AlignedCorpus corpus;
    corpus.languages = {"en", "hi"};
    for (const Item& item : items) {
        corpus.alignment_ids.push_back(item.id);
        AlignedExample en{item.id, "en", item.passage_en, item.question_en, item.truth_en};
        AlignedExample hi{item.id, "hi", item.passage_hi, item.question_hi, item.truth_hi};
        corpus.examples[item.id] = {{"en", std::move(en)}, {"hi", std::move(hi)}};
    }
    return corpus;
}

void write_fixture_dir(const std::filesystem::path& dir, std::uint64_t seed,
                       std::uint32_t n_layers, std::uint32_t n_heads, std::uint32_t d_head,
                       std::uint32_t max_seq_len, std::uint32_t max_new_tokens) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw HgError(Err::Io, "cannot create '" + dir.string() + "': " + ec.message());
    }

    ModelConfig config;
    config.n_layers = n_layers;
    config.n_heads = n_heads;
    config.d_model = n_heads * d_head;
    config.d_head = d_head;
    config.vocab_size = kByteVocabSize;
    config.max_seq_len = max_seq_len;
    if (max_new_tokens + 2 > max_seq_len) {
        throw HgError(Err::Config, "max_new_tokens leaves no room for a prompt");
    }
    save_model(make_random_model(config, seed), dir / "model.hgt");

    const AlignedCorpus corpus = make_demo_corpus();
    save_corpus(corpus, dir / "corpus.jsonl");

    nlohmann::ordered_json cfg;
    cfg["model"] = {{"path", "model.hgt"}};
    cfg["corpus"] = {{"path", "corpus.jsonl"}, {"languages", {"en", "hi"}}};
    // layer/head labels in configs are 1-based, like every report surface
    cfg["sweep"] = {{"layer_first", 1},
                    {"layer_last", n_layers},
                    {"head_first", 1},
                    {"head_last", n_heads},
                    {"examples_per_language", corpus.size()},
                    {"max_new_tokens", max_new_tokens},
                    {"cache_dir", "cache"},
                    {"seed", seed},
                    {"parallel", 1}};
    cfg["classify"] = {{"delta", 0.25}};
    cfg["judge"] = {{"kind", "exact"}};

    std::ofstream out(dir / "config.json", std::ios::trunc);
    if (!out) throw HgError(Err::Io, "cannot write fixture config");
    out << cfg.dump(2) << '\n';
    out.flush();
    if (!out) throw HgError(Err::Io, "write failed for fixture config");
}

}  // namespace headgate
