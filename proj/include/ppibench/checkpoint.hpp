#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppibench/tensor.hpp"

namespace ppibench::nn {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checkpoint container: magic "PPIB", u32 version, then per parameter
//   u32 name length, name bytes, u32 rank, u32 extents..., f32 data
// all little-endian, records until EOF.
inline constexpr char kCheckpointMagic[4] = {'P', 'P', 'I', 'B'};
inline constexpr uint32_t kCheckpointVersion = 1;

namespace detail {

inline void write_u32(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

inline void write_u64(std::ostream& out, uint64_t v) {
    write_u32(out, static_cast<uint32_t>(v & 0xffffffffu));
    write_u32(out, static_cast<uint32_t>(v >> 32));
}

inline bool read_u32(std::istream& in, uint32_t& v) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    v = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
        (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    return true;
}

inline bool read_u64(std::istream& in, uint64_t& v) {
    uint32_t lo = 0, hi = 0;
    if (!read_u32(in, lo) || !read_u32(in, hi)) return false;
    v = (static_cast<uint64_t>(hi) << 32) | lo;
    return true;
}

// f32 payloads are written via memcpy; the build targets little-endian IEEE
// hosts (asserted in the test suite).
inline void write_f32s(std::ostream& out, const float* data, size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(float)));
}

inline bool read_f32s(std::istream& in, float* data, size_t n) {
    return static_cast<bool>(
        in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(float))));
}

}  // namespace detail

template <typename T>
inline void save_checkpoint(std::ostream& out, const ParamStore<T>& store) {
    out.write(kCheckpointMagic, 4);
    detail::write_u32(out, kCheckpointVersion);
    for (const Parameter<T>* p : store.all()) {
        detail::write_u32(out, static_cast<uint32_t>(p->name.size()));
        out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        detail::write_u32(out, static_cast<uint32_t>(p->dims.size()));
        for (int d : p->dims) detail::write_u32(out, static_cast<uint32_t>(d));
        std::vector<float> data(p->value.size());
        for (size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(p->value[i]);
        detail::write_f32s(out, data.data(), data.size());
    }
    if (!out) throw CheckpointError("checkpoint write failed");
}

// Loads values into an existing store; every record must match a parameter of
// identical name and dims.
template <typename T>
inline void load_checkpoint(std::istream& in, ParamStore<T>& store) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw CheckpointError("checkpoint: bad magic");
    uint32_t version = 0;
    if (!detail::read_u32(in, version) || version != kCheckpointVersion)
        throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
    size_t loaded = 0;
    while (true) {
        uint32_t name_len = 0;
        if (!detail::read_u32(in, name_len)) break;  // clean EOF
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw CheckpointError("checkpoint: truncated name");
        uint32_t rank = 0;
        if (!detail::read_u32(in, rank) || rank == 0 || rank > 2)
            throw CheckpointError("checkpoint: bad rank for " + name);
        std::vector<int> dims(rank);
        size_t n = 1;
        for (auto& d : dims) {
            uint32_t e = 0;
            if (!detail::read_u32(in, e)) throw CheckpointError("checkpoint: truncated extents");
            d = static_cast<int>(e);
            n *= e;
        }
        std::vector<float> data(n);
        if (!detail::read_f32s(in, data.data(), n))
            throw CheckpointError("checkpoint: truncated payload for " + name);
        Parameter<T>* p = store.find(name);
        if (!p) throw CheckpointError("checkpoint: unknown parameter " + name);
        if (p->dims != dims) throw CheckpointError("checkpoint: shape mismatch for " + name);
        for (size_t i = 0; i < n; ++i) p->value[i] = static_cast<T>(data[i]);
        ++loaded;
    }
    if (loaded != store.count())
        throw CheckpointError("checkpoint: expected " + std::to_string(store.count()) +
                              " parameters, found " + std::to_string(loaded));
}

template <typename T>
inline void save_checkpoint_file(const std::string& path, const ParamStore<T>& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write " + path);
    save_checkpoint(out, store);
}

template <typename T>
inline void load_checkpoint_file(const std::string& path, ParamStore<T>& store) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot read " + path);
    load_checkpoint(in, store);
}

}  // namespace ppibench::nn
