#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ppibench/embedder.hpp"
#include "ppibench/tensor.hpp"

namespace ppibench::nn {

enum class Arch { ec, sc, hp, pad };
enum class Paradigm { finetune, frozen };

inline const char* arch_name(Arch a) {
    switch (a) {
        case Arch::ec: return "ec";
        case Arch::sc: return "sc";
        case Arch::hp: return "hp";
        case Arch::pad: return "pad";
    }
    return "?";
}

inline Arch arch_from_name(std::string_view s) {
    if (s == "ec") return Arch::ec;
    if (s == "sc") return Arch::sc;
    if (s == "hp") return Arch::hp;
    if (s == "pad") return Arch::pad;
    throw TensorError("unknown architecture '" + std::string(s) + "'");
}

struct ArchitectureConfig {
    Arch arch = Arch::pad;
    int mha_heads = 4;
    int mlp_hidden = 0;  // 0 means e_dim
    Paradigm paradigm = Paradigm::finetune;

    int mlp_input_width(int e_dim) const {
        return (arch == Arch::ec || arch == Arch::hp) ? 2 * e_dim : e_dim;
    }
    int hidden(int e_dim) const { return mlp_hidden > 0 ? mlp_hidden : e_dim; }
    void validate(int e_dim) const {
        if (mha_heads < 1 || e_dim % mha_heads != 0)
            throw TensorError("architecture: e_dim must be a positive multiple of mha_heads");
    }
};

struct MhaParams {
    std::string q, k, v, o;  // parameter names
};

// All parameters for one (embedder, architecture) configuration. Ligand and
// receptor pathways deliberately reference the same tensors; EC/SC/PAD pool
// with level 1 and HP stacks level 1 then level 2, which is what makes the
// single-chain HP/EC equivalence an identity of op sequences.
template <typename T>
struct ModelState {
    EmbedderConfig emb;
    ArchitectureConfig arch;
    ParamStore<T> store;

    Parameter<T>* tok_embed = nullptr;
    struct CtxLayer {
        Parameter<T>*q = nullptr, *k = nullptr, *v = nullptr, *o = nullptr;
    };
    std::vector<CtxLayer> ctx;
    Parameter<T>* pool_w1 = nullptr;
    Parameter<T>* pool_w2 = nullptr;
    Parameter<T>*mha_q = nullptr, *mha_k = nullptr, *mha_v = nullptr, *mha_o = nullptr;
    Parameter<T>*mlp_w1 = nullptr, *mlp_b1 = nullptr, *mlp_w2 = nullptr, *mlp_b2 = nullptr;

    const EmbeddingMap* frozen_embeddings = nullptr;  // frozen_file mode only

    std::vector<Parameter<T>*> embedder_params() {
        std::vector<Parameter<T>*> out{tok_embed};
        for (auto& l : ctx) {
            out.push_back(l.q);
            out.push_back(l.k);
            out.push_back(l.v);
            out.push_back(l.o);
        }
        return out;
    }
    std::vector<Parameter<T>*> head_params() {
        return {pool_w1, pool_w2, mha_q, mha_k, mha_v, mha_o, mlp_w1, mlp_b1, mlp_w2, mlp_b2};
    }
    // Parameters the optimizer may touch under the configured paradigm.
    std::vector<Parameter<T>*> trainable_params() {
        if (arch.paradigm == Paradigm::frozen || emb.mode == EmbedderMode::frozen_file)
            return head_params();
        auto out = embedder_params();
        for (auto* p : head_params()) out.push_back(p);
        return out;
    }
};

template <typename T>
inline ModelState<T> make_model(EmbedderConfig emb, ArchitectureConfig arch, uint64_t seed) {
    emb.validate();
    arch.validate(emb.e_dim);
    ModelState<T> m;
    m.emb = emb;
    m.arch = arch;
    std::mt19937 rng(static_cast<uint32_t>(seed ^ (seed >> 32)));
    const int d = emb.e_dim;

    m.tok_embed = &m.store.add("embedder.tok", {kVocabSize, d});
    init_uniform(*m.tok_embed, rng, 0.8);
    for (int l = 0; l < emb.context_layers; ++l) {
        typename ModelState<T>::CtxLayer layer;
        std::string base = "embedder.ctx" + std::to_string(l) + ".";
        layer.q = &m.store.add(base + "q", {d, d});
        layer.k = &m.store.add(base + "k", {d, d});
        layer.v = &m.store.add(base + "v", {d, d});
        layer.o = &m.store.add(base + "o", {d, d});
        init_xavier(*layer.q, rng);
        init_xavier(*layer.k, rng);
        init_xavier(*layer.v, rng);
        init_xavier(*layer.o, rng);
        m.ctx.push_back(layer);
    }
    m.pool_w1 = &m.store.add("pool.level1.w", {d, 1});
    m.pool_w2 = &m.store.add("pool.level2.w", {d, 1});
    init_xavier(*m.pool_w1, rng);
    init_xavier(*m.pool_w2, rng);
    m.mha_q = &m.store.add("mha.q", {d, d});
    m.mha_k = &m.store.add("mha.k", {d, d});
    m.mha_v = &m.store.add("mha.v", {d, d});
    m.mha_o = &m.store.add("mha.o", {d, d});
    init_xavier(*m.mha_q, rng);
    init_xavier(*m.mha_k, rng);
    init_xavier(*m.mha_v, rng);
    init_xavier(*m.mha_o, rng);
    const int in_w = arch.mlp_input_width(d);
    const int hid = arch.hidden(d);
    m.mlp_w1 = &m.store.add("mlp.w1", {in_w, hid});
    m.mlp_b1 = &m.store.add("mlp.b1", {1, hid});
    m.mlp_w2 = &m.store.add("mlp.w2", {hid, 1});
    m.mlp_b2 = &m.store.add("mlp.b2", {1, 1});
    init_xavier(*m.mlp_w1, rng);
    init_xavier(*m.mlp_w2, rng);
    return m;
}

// --- building blocks --------------------------------------------------------

// Global 1D attention pooler: linear score per position, softmax, weighted
// sum. Returns both the pooled 1 x d vector and the 1 x n weight row.
struct Pooled {
    int pooled;
    int alpha;
};

template <typename T>
inline Pooled attention_pool_full(Tape<T>& tape, int h, Parameter<T>& w) {
    if (tape.shape(h).rows < 1) throw TensorError("attention_pool: empty input");
    int scores = tape.matmul(h, tape.leaf(w));           // n x 1
    int alpha = tape.softmax_rows(tape.transpose(scores));  // 1 x n
    int pooled = tape.matmul(alpha, h);                  // 1 x d
    return {pooled, alpha};
}

template <typename T>
inline int attention_pool(Tape<T>& tape, int h, Parameter<T>& w) {
    return attention_pool_full(tape, h, w).pooled;
}

// Standard multi-head attention; q_seq attends over kv_seq. Scale is
// 1/sqrt(e_dim / heads); softmax runs over kv positions.
template <typename T>
inline int multi_head_attention(Tape<T>& tape, int q_seq, int kv_seq, Parameter<T>& wq,
                                Parameter<T>& wk, Parameter<T>& wv, Parameter<T>& wo, int heads) {
    int d = tape.shape(q_seq).cols;
    if (heads < 1 || d % heads != 0)
        throw TensorError("multi_head_attention: width " + std::to_string(d) +
                          " not divisible by " + std::to_string(heads) + " heads");
    int dh = d / heads;
    int Q = tape.matmul(q_seq, tape.leaf(wq));
    int K = tape.matmul(kv_seq, tape.leaf(wk));
    int V = tape.matmul(kv_seq, tape.leaf(wv));
    T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
    int merged = -1;
    for (int h = 0; h < heads; ++h) {
        int qh = tape.slice_cols(Q, h * dh, (h + 1) * dh);
        int kh = tape.slice_cols(K, h * dh, (h + 1) * dh);
        int vh = tape.slice_cols(V, h * dh, (h + 1) * dh);
        int att = tape.softmax_rows(tape.scale(tape.matmul(qh, tape.transpose(kh)), scale));
        int oh = tape.matmul(att, vh);
        merged = h == 0 ? oh : tape.concat_cols(merged, oh);
    }
    return tape.matmul(merged, tape.leaf(wo));
}

// Trainable mock PLM: token embedding + sinusoidal positions, then
// context_layers residual self-attention blocks, then optional row
// normalization.
template <typename T>
inline int mock_embed(Tape<T>& tape, ModelState<T>& m, const std::vector<int>& tokens) {
    if (tokens.empty()) throw TensorError("mock_embed: empty token sequence");
    const int d = m.emb.e_dim;
    int x = tape.gather_rows(*m.tok_embed, tokens);
    if (m.emb.position_signal) {
        auto pe = sinusoid_positions<T>(static_cast<int>(tokens.size()), d);
        for (auto& v : pe) v *= T(0.1);  // keep token identity dominant
        x = tape.add(x, tape.constant({static_cast<int>(tokens.size()), d}, std::move(pe)));
    }
    for (auto& layer : m.ctx)
        x = tape.add(x, multi_head_attention(tape, x, x, *layer.q, *layer.k, *layer.v, *layer.o,
                                             m.emb.attn_heads));
    if (m.emb.l2_normalize_rows) x = tape.l2_normalize_rows(x);
    return x;
}

// One partner as the forward passes consume it. record_prefix (e.g.
// "1ABC:1/lig") keys precomputed embeddings in frozen_file mode.
struct PartnerInput {
    TokenizedPartner tokens;
    std::string record_prefix;
};

template <typename T>
inline int embed_form(Tape<T>& tape, ModelState<T>& m, const std::vector<int>& tokens,
                      const std::string& record_id) {
    if (m.emb.mode == EmbedderMode::trainable_mock) return mock_embed(tape, m, tokens);
    if (!m.frozen_embeddings)
        throw TensorError("frozen_file mode: no embedding map attached");
    auto it = m.frozen_embeddings->find(record_id);
    if (it == m.frozen_embeddings->end())
        throw TensorError("frozen_file mode: no embedding record '" + record_id + "'");
    const EmbeddingRecord& rec = it->second;
    if (rec.e_dim != m.emb.e_dim || rec.seq_len != static_cast<int>(tokens.size()))
        throw TensorError("frozen_file mode: record '" + record_id + "' shape mismatch");
    std::vector<T> v(rec.data.begin(), rec.data.end());
    int x = tape.constant({rec.seq_len, rec.e_dim}, std::move(v));
    if (m.emb.l2_normalize_rows) x = tape.l2_normalize_rows(x);
    return x;
}

template <typename T>
inline int mlp_forward(Tape<T>& tape, ModelState<T>& m, int x) {
    int expected = m.arch.mlp_input_width(m.emb.e_dim);
    if (tape.shape(x).cols != expected || tape.shape(x).rows != 1)
        throw TensorError("mlp: expected 1x" + std::to_string(expected) + ", got " +
                          tape.shape(x).str());
    int h = tape.relu(tape.add(tape.matmul(x, tape.leaf(*m.mlp_w1)), tape.leaf(*m.mlp_b1)));
    return tape.add(tape.matmul(h, tape.leaf(*m.mlp_w2)), tape.leaf(*m.mlp_b2));
}

// --- the four architectures -------------------------------------------------

namespace detail {

inline void require_nonempty(const PartnerInput& p, const char* who) {
    if (p.tokens.chains.empty()) throw TensorError(std::string(who) + ": partner has no chains");
    for (const auto& c : p.tokens.chains)
        if (c.empty()) throw TensorError(std::string(who) + ": empty chain");
}

}  // namespace detail

// Embeddings concatenation: pool each EOS-joined partner, concatenate the two
// pooled vectors, regress.
template <typename T>
inline int forward_ec(Tape<T>& tape, ModelState<T>& m, const PartnerInput& lig,
                      const PartnerInput& rec) {
    detail::require_nonempty(lig, "forward_ec");
    detail::require_nonempty(rec, "forward_ec");
    int el = embed_form(tape, m, lig.tokens.concat_with_eos(), lig.record_prefix + "/concat");
    int er = embed_form(tape, m, rec.tokens.concat_with_eos(), rec.record_prefix + "/concat");
    int pl = attention_pool(tape, el, *m.pool_w1);
    int pr = attention_pool(tape, er, *m.pool_w1);
    return mlp_forward(tape, m, tape.concat_cols(pl, pr));
}

// Sequences concatenation: one fused token sequence through the embedder, one
// pool, regress.
template <typename T>
inline int forward_sc(Tape<T>& tape, ModelState<T>& m, const PartnerInput& lig,
                      const PartnerInput& rec) {
    detail::require_nonempty(lig, "forward_sc");
    detail::require_nonempty(rec, "forward_sc");
    std::vector<int> tokens = lig.tokens.concat_with_eos();
    std::vector<int> rtok = rec.tokens.concat_with_eos();
    tokens.insert(tokens.end(), rtok.begin(), rtok.end());
    // frozen records store the fused form under the ligand prefix
    int e = embed_form(tape, m, tokens, lig.record_prefix + "/scconcat");
    int p = attention_pool(tape, e, *m.pool_w1);
    return mlp_forward(tape, m, p);
}

// Hierarchical pooling: each chain embedded on its own, pooled to a chain
// vector (level 1), chain vectors pooled across the partner (level 2).
template <typename T>
inline int forward_hp(Tape<T>& tape, ModelState<T>& m, const PartnerInput& lig,
                      const PartnerInput& rec) {
    detail::require_nonempty(lig, "forward_hp");
    detail::require_nonempty(rec, "forward_hp");
    auto partner_vec = [&](const PartnerInput& p) {
        std::vector<int> chain_rows;
        for (size_t i = 0; i < p.tokens.chains.size(); ++i) {
            int e = embed_form(tape, m, p.tokens.chain_with_eos(i),
                               p.record_prefix + "/chain" + std::to_string(i));
            chain_rows.push_back(attention_pool(tape, e, *m.pool_w1));
        }
        int stacked = tape.stack_rows(chain_rows);  // L x d
        return attention_pool(tape, stacked, *m.pool_w2);
    };
    int pl = partner_vec(lig);
    int pr = partner_vec(rec);
    return mlp_forward(tape, m, tape.concat_cols(pl, pr));
}

// Pooled attention addition: EC-style partner encodings exchanged through a
// shared cross-attention block with residual adds, pooled, then combined by
// element-wise addition (which is what makes the forward symmetric under
// ligand/receptor swap).
template <typename T>
inline int forward_pad(Tape<T>& tape, ModelState<T>& m, const PartnerInput& lig,
                       const PartnerInput& rec) {
    detail::require_nonempty(lig, "forward_pad");
    detail::require_nonempty(rec, "forward_pad");
    int el = embed_form(tape, m, lig.tokens.concat_with_eos(), lig.record_prefix + "/concat");
    int er = embed_form(tape, m, rec.tokens.concat_with_eos(), rec.record_prefix + "/concat");
    int al = multi_head_attention(tape, el, er, *m.mha_q, *m.mha_k, *m.mha_v, *m.mha_o,
                                  m.arch.mha_heads);
    int ar = multi_head_attention(tape, er, el, *m.mha_q, *m.mha_k, *m.mha_v, *m.mha_o,
                                  m.arch.mha_heads);
    int pl = attention_pool(tape, tape.add(el, al), *m.pool_w1);
    int pr = attention_pool(tape, tape.add(er, ar), *m.pool_w1);
    return mlp_forward(tape, m, tape.add(pl, pr));
}

template <typename T>
inline int forward_arch(Tape<T>& tape, ModelState<T>& m, const PartnerInput& lig,
                        const PartnerInput& rec) {
    switch (m.arch.arch) {
        case Arch::ec: return forward_ec(tape, m, lig, rec);
        case Arch::sc: return forward_sc(tape, m, lig, rec);
        case Arch::hp: return forward_hp(tape, m, lig, rec);
        case Arch::pad: return forward_pad(tape, m, lig, rec);
    }
    throw TensorError("forward_arch: bad architecture");
}

}  // namespace ppibench::nn
