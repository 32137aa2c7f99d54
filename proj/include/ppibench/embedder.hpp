#pragma once

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppibench/amino.hpp"
#include "ppibench/checkpoint.hpp"
#include "ppibench/tensor.hpp"

namespace ppibench::nn {

// Token vocabulary: the 21 residue symbols, then EOS, then PAD.
inline constexpr int kTokenX = 20;
inline constexpr int kTokenEos = 21;
inline constexpr int kTokenPad = 22;
inline constexpr int kVocabSize = 23;

inline int residue_token(char aa) {
    auto p = kCanonicalAlphabet.find(aa);
    if (p != std::string_view::npos) return static_cast<int>(p);
    if (aa == kUnknownResidue) return kTokenX;
    throw TensorError("unknown residue token '" + std::string(1, aa) + "'");
}

inline std::vector<int> tokenize_sequence(std::string_view seq) {
    std::vector<int> out;
    out.reserve(seq.size());
    for (char c : seq) out.push_back(residue_token(c));
    return out;
}

// One interacting partner. concat_with_eos() yields c1 [EOS] c2 [EOS] ... cL [EOS]
// with an EOS after every chain including the last.
struct TokenizedPartner {
    std::vector<std::vector<int>> chains;

    std::vector<int> concat_with_eos() const {
        std::vector<int> out;
        for (const auto& c : chains) {
            out.insert(out.end(), c.begin(), c.end());
            out.push_back(kTokenEos);
        }
        return out;
    }
    // Per-chain tokens with one terminal EOS, as the hierarchical path feeds
    // them; for a single chain this equals concat_with_eos().
    std::vector<int> chain_with_eos(size_t i) const {
        std::vector<int> out = chains[i];
        out.push_back(kTokenEos);
        return out;
    }
    size_t total_tokens_with_eos() const {
        size_t n = chains.size();
        for (const auto& c : chains) n += c.size();
        return n;
    }
};

inline TokenizedPartner tokenize_partner(const std::vector<std::string>& seqs) {
    TokenizedPartner p;
    for (const auto& s : seqs) p.chains.push_back(tokenize_sequence(s));
    return p;
}

enum class EmbedderMode { trainable_mock, frozen_file };

struct EmbedderConfig {
    int e_dim = 32;
    EmbedderMode mode = EmbedderMode::trainable_mock;
    bool l2_normalize_rows = false;
    int context_layers = 1;   // self-attention layers in the mock embedder
    int attn_heads = 4;       // must divide e_dim
    bool position_signal = true;  // sinusoidal positions; zeroable for diagnostics

    void validate() const {
        if (e_dim <= 0 || attn_heads <= 0 || e_dim % attn_heads != 0)
            throw TensorError("embedder: e_dim must be a positive multiple of attn_heads");
        if (context_layers < 0) throw TensorError("embedder: context_layers must be >= 0");
    }
};

// Standard sinusoidal position encoding, n x d.
template <typename T>
inline std::vector<T> sinusoid_positions(int n, int d) {
    std::vector<T> pe(static_cast<size_t>(n) * d, T(0));
    for (int pos = 0; pos < n; ++pos) {
        for (int i = 0; i < d; i += 2) {
            double freq = std::pow(10000.0, -static_cast<double>(i) / d);
            pe[static_cast<size_t>(pos) * d + i] = static_cast<T>(std::sin(pos * freq));
            if (i + 1 < d) pe[static_cast<size_t>(pos) * d + i + 1] = static_cast<T>(std::cos(pos * freq));
        }
    }
    return pe;
}

// --- embedding interchange ("PPIE") ----------------------------------------
// magic "PPIE", u32 version=1, u32 e_dim, u64 record count; per record:
// u32 id length, UTF-8 id, u32 seq_len, seq_len x e_dim f32 little-endian.
// Record id convention: <entry_id>/<partner>/<form>, partner in {lig, rec},
// form in {concat, chain<i>}.

struct EmbeddingFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr char kEmbeddingMagic[4] = {'P', 'P', 'I', 'E'};
inline constexpr uint32_t kEmbeddingVersion = 1;

struct EmbeddingRecord {
    int seq_len = 0;
    int e_dim = 0;
    std::vector<float> data;  // seq_len x e_dim row-major
};

using EmbeddingMap = std::map<std::string, EmbeddingRecord>;

inline void write_embeddings(std::ostream& out, int e_dim, const EmbeddingMap& records) {
    out.write(kEmbeddingMagic, 4);
    detail::write_u32(out, kEmbeddingVersion);
    detail::write_u32(out, static_cast<uint32_t>(e_dim));
    detail::write_u64(out, records.size());
    for (const auto& [id, rec] : records) {
        if (rec.e_dim != e_dim)
            throw EmbeddingFileError("embedding file: record '" + id + "' has e_dim " +
                                     std::to_string(rec.e_dim) + ", file-level " + std::to_string(e_dim));
        detail::write_u32(out, static_cast<uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        detail::write_u32(out, static_cast<uint32_t>(rec.seq_len));
        detail::write_f32s(out, rec.data.data(), rec.data.size());
    }
    if (!out) throw EmbeddingFileError("embedding file: write failed");
}

inline EmbeddingMap read_embeddings(std::istream& in, int* e_dim_out = nullptr) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kEmbeddingMagic, 4) != 0)
        throw EmbeddingFileError("embedding file: bad magic");
    uint32_t version = 0, e_dim = 0;
    uint64_t count = 0;
    if (!detail::read_u32(in, version) || version != kEmbeddingVersion)
        throw EmbeddingFileError("embedding file: unsupported version");
    if (!detail::read_u32(in, e_dim) || e_dim == 0)
        throw EmbeddingFileError("embedding file: bad e_dim");
    if (!detail::read_u64(in, count)) throw EmbeddingFileError("embedding file: truncated header");
    EmbeddingMap out;
    for (uint64_t r = 0; r < count; ++r) {
        uint32_t id_len = 0;
        if (!detail::read_u32(in, id_len)) throw EmbeddingFileError("embedding file: truncated record");
        std::string id(id_len, '\0');
        if (!in.read(id.data(), id_len)) throw EmbeddingFileError("embedding file: truncated id");
        uint32_t seq_len = 0;
        if (!detail::read_u32(in, seq_len)) throw EmbeddingFileError("embedding file: truncated length");
        EmbeddingRecord rec;
        rec.seq_len = static_cast<int>(seq_len);
        rec.e_dim = static_cast<int>(e_dim);
        rec.data.resize(static_cast<size_t>(seq_len) * e_dim);
        if (!detail::read_f32s(in, rec.data.data(), rec.data.size()))
            throw EmbeddingFileError("embedding file: truncated payload for '" + id + "'");
        out.emplace(std::move(id), std::move(rec));
    }
    if (e_dim_out) *e_dim_out = static_cast<int>(e_dim);
    return out;
}

inline void write_embeddings_file(const std::string& path, int e_dim, const EmbeddingMap& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EmbeddingFileError("cannot write " + path);
    write_embeddings(out, e_dim, m);
}

inline EmbeddingMap read_embeddings_file(const std::string& path, int* e_dim_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmbeddingFileError("cannot read " + path);
    return read_embeddings(in, e_dim_out);
}

}  // namespace ppibench::nn
