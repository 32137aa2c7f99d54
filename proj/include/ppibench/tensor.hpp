#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppibench::nn {

struct TensorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Shape {
    int rows = 1;
    int cols = 1;
    int size() const { return rows * cols; }
    friend bool operator==(const Shape&, const Shape&) = default;
    std::string str() const { return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")"; }
};

inline void require_same(const Shape& a, const Shape& b, const char* op) {
    if (!(a == b))
        throw TensorError(std::string(op) + ": shape mismatch " + a.str() + " vs " + b.str());
}

// A named trainable tensor. Values persist across tape lifetimes; gradients
// accumulate across backward() calls until the optimizer consumes them.
template <typename T>
struct Parameter {
    std::string name;
    std::vector<int> dims;  // rank 1 or 2, row-major
    std::vector<T> value;
    std::vector<T> grad;

    Shape shape() const {
        if (dims.size() == 1) return {1, dims[0]};
        return {dims[0], dims[1]};
    }
    size_t size() const { return value.size(); }
    void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

template <typename T>
class ParamStore {
  public:
    Parameter<T>& add(std::string name, std::vector<int> dims) {
        size_t n = 1;
        for (int d : dims) n *= static_cast<size_t>(d);
        auto p = std::make_unique<Parameter<T>>();
        p->name = std::move(name);
        p->dims = std::move(dims);
        p->value.assign(n, T(0));
        p->grad.assign(n, T(0));
        params_.push_back(std::move(p));
        return *params_.back();
    }

    Parameter<T>* find(std::string_view name) {
        for (auto& p : params_)
            if (p->name == name) return p.get();
        return nullptr;
    }
    const Parameter<T>* find(std::string_view name) const {
        for (const auto& p : params_)
            if (p->name == name) return p.get();
        return nullptr;
    }

    std::vector<Parameter<T>*> all() {
        std::vector<Parameter<T>*> out;
        for (auto& p : params_) out.push_back(p.get());
        return out;
    }
    std::vector<const Parameter<T>*> all() const {
        std::vector<const Parameter<T>*> out;
        for (const auto& p : params_) out.push_back(p.get());
        return out;
    }
    size_t count() const { return params_.size(); }
    void zero_grad() {
        for (auto& p : params_) p->zero_grad();
    }

    // Deep value copy into another scalar type (float -> double is exact),
    // used by the finite-difference shadow.
    template <typename U>
    void copy_values_into(ParamStore<U>& other) const {
        for (const auto& p : params_) {
            Parameter<U>* q = other.find(p->name);
            if (!q || q->size() != p->size())
                throw TensorError("copy_values_into: store layout mismatch at " + p->name);
            for (size_t i = 0; i < p->size(); ++i) q->value[i] = static_cast<U>(p->value[i]);
        }
    }

  private:
    std::vector<std::unique_ptr<Parameter<T>>> params_;  // stable addresses
};

// Reverse-mode tape. Every op records a node whose backward closure scatters
// the node's gradient to its inputs; nodes are replayed in reverse creation
// order, which is a topological order by construction.
template <typename T>
class Tape {
  public:
    struct Node {
        Shape shape;
        std::vector<T> value;
        std::vector<T> grad;
        std::function<void(Tape&)> backward;
    };

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<T>& value(int i) const { return nodes_[static_cast<size_t>(i)].value; }
    const std::vector<T>& grad(int i) const { return nodes_[static_cast<size_t>(i)].grad; }
    Shape shape(int i) const { return nodes_[static_cast<size_t>(i)].shape; }
    T scalar(int i) const {
        if (nodes_[static_cast<size_t>(i)].shape.size() != 1)
            throw TensorError("scalar: node is not 1x1");
        return nodes_[static_cast<size_t>(i)].value[0];
    }

    int constant(Shape s, std::vector<T> v) {
        if (static_cast<int>(v.size()) != s.size())
            throw TensorError("constant: data length does not match " + s.str());
        return push(s, std::move(v), nullptr);
    }

    // Leaf node bound to a parameter; backward accumulates into p.grad.
    int leaf(Parameter<T>& p) {
        int id = push(p.shape(), p.value, nullptr);
        Parameter<T>* pp = &p;
        node(id).backward = [id, pp](Tape& t) {
            const auto& g = t.node(id).grad;
            for (size_t i = 0; i < g.size(); ++i) pp->grad[i] += g[i];
        };
        return id;
    }

    // Embedding lookup: rows of `table` selected by ids. Gradient scatter-adds
    // into the table.
    int gather_rows(Parameter<T>& table, const std::vector<int>& ids) {
        Shape ts = table.shape();
        Shape s{static_cast<int>(ids.size()), ts.cols};
        std::vector<T> v(static_cast<size_t>(s.size()));
        for (size_t r = 0; r < ids.size(); ++r) {
            int row = ids[r];
            if (row < 0 || row >= ts.rows)
                throw TensorError("gather_rows: id " + std::to_string(row) + " out of range");
            for (int c = 0; c < ts.cols; ++c)
                v[r * ts.cols + c] = table.value[static_cast<size_t>(row) * ts.cols + c];
        }
        int id = push(s, std::move(v), nullptr);
        Parameter<T>* tp = &table;
        std::vector<int> idx = ids;
        node(id).backward = [id, tp, idx](Tape& t) {
            const auto& g = t.node(id).grad;
            int cols = tp->shape().cols;
            for (size_t r = 0; r < idx.size(); ++r)
                for (int c = 0; c < cols; ++c)
                    tp->grad[static_cast<size_t>(idx[r]) * cols + c] += g[r * cols + c];
        };
        return id;
    }

    int matmul(int a, int b) {
        Shape sa = shape(a), sb = shape(b);
        if (sa.cols != sb.rows)
            throw TensorError("matmul: inner dims " + sa.str() + " vs " + sb.str());
        Shape s{sa.rows, sb.cols};
        std::vector<T> v(static_cast<size_t>(s.size()), T(0));
        const auto& va = value(a);
        const auto& vb = value(b);
        for (int i = 0; i < sa.rows; ++i)
            for (int k = 0; k < sa.cols; ++k) {
                T aik = va[static_cast<size_t>(i) * sa.cols + k];
                for (int j = 0; j < sb.cols; ++j)
                    v[static_cast<size_t>(i) * s.cols + j] += aik * vb[static_cast<size_t>(k) * sb.cols + j];
            }
        int id = push(s, std::move(v), nullptr);
        node(id).backward = [id, a, b, sa, sb, s](Tape& t) {
            const auto& g = t.node(id).grad;
            const auto& va2 = t.value(a);
            const auto& vb2 = t.value(b);
            auto& ga = t.node(a).grad;
            auto& gb = t.node(b).grad;
            // dA = dC * B^T
            for (int i = 0; i < sa.rows; ++i)
                for (int k = 0; k < sa.cols; ++k) {
                    T acc = T(0);
                    for (int j = 0; j < s.cols; ++j)
                        acc += g[static_cast<size_t>(i) * s.cols + j] * vb2[static_cast<size_t>(k) * sb.cols + j];
                    ga[static_cast<size_t>(i) * sa.cols + k] += acc;
                }
            // dB = A^T * dC
            for (int k = 0; k < sb.rows; ++k)
                for (int j = 0; j < sb.cols; ++j) {
                    T acc = T(0);
                    for (int i = 0; i < sa.rows; ++i)
                        acc += va2[static_cast<size_t>(i) * sa.cols + k] * g[static_cast<size_t>(i) * s.cols + j];
                    gb[static_cast<size_t>(k) * sb.cols + j] += acc;
                }
        };
        return id;
    }

    int add(int a, int b) { return binary(a, b, "add", [](T x, T y) { return x + y; }, T(1), T(1)); }
    int sub(int a, int b) { return binary(a, b, "sub", [](T x, T y) { return x - y; }, T(1), T(-1)); }

    int mul(int a, int b) {
        require_same(shape(a), shape(b), "mul");
        std::vector<T> v(value(a).size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = value(a)[i] * value(b)[i];
        int id = push(shape(a), std::move(v), nullptr);
        node(id).backward = [id, a, b](Tape& t) {
            const auto& g = t.node(id).grad;
            for (size_t i = 0; i < g.size(); ++i) {
                t.node(a).grad[i] += g[i] * t.value(b)[i];
                t.node(b).grad[i] += g[i] * t.value(a)[i];
            }
        };
        return id;
    }

    int scale(int a, T c) {
        std::vector<T> v(value(a).size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = value(a)[i] * c;
        int id = push(shape(a), std::move(v), nullptr);
        node(id).backward = [id, a, c](Tape& t) {
            const auto& g = t.node(id).grad;
            for (size_t i = 0; i < g.size(); ++i) t.node(a).grad[i] += g[i] * c;
        };
        return id;
    }

    int relu(int a) {
        std::vector<T> v(value(a).size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = value(a)[i] > T(0) ? value(a)[i] : T(0);
        int id = push(shape(a), std::move(v), nullptr);
        node(id).backward = [id, a](Tape& t) {
            const auto& g = t.node(id).grad;
            for (size_t i = 0; i < g.size(); ++i)
                if (t.value(a)[i] > T(0)) t.node(a).grad[i] += g[i];
        };
        return id;
    }

    // Max-subtracted softmax along each row.
    int softmax_rows(int a) {
        Shape s = shape(a);
        std::vector<T> v(value(a).size());
        const auto& x = value(a);
        for (int r = 0; r < s.rows; ++r) {
            const T* row = x.data() + static_cast<size_t>(r) * s.cols;
            T* out = v.data() + static_cast<size_t>(r) * s.cols;
            T m = row[0];
            for (int c = 1; c < s.cols; ++c) m = std::max(m, row[c]);
            T sum = T(0);
            for (int c = 0; c < s.cols; ++c) {
                out[c] = std::exp(row[c] - m);
                sum += out[c];
            }
            for (int c = 0; c < s.cols; ++c) out[c] /= sum;
        }
        int id = push(s, std::move(v), nullptr);
        node(id).backward = [id, a, s](Tape& t) {
            const auto& y = t.value(id);
            const auto& g = t.node(id).grad;
            auto& ga = t.node(a).grad;
            for (int r = 0; r < s.rows; ++r) {
                size_t off = static_cast<size_t>(r) * s.cols;
                T dot = T(0);
                for (int c = 0; c < s.cols; ++c) dot += g[off + c] * y[off + c];
                for (int c = 0; c < s.cols; ++c) ga[off + c] += y[off + c] * (g[off + c] - dot);
            }
        };
        return id;
    }

    int transpose(int a) {
        Shape s = shape(a);
        Shape st{s.cols, s.rows};
        std::vector<T> v(value(a).size());
        for (int r = 0; r < s.rows; ++r)
            for (int c = 0; c < s.cols; ++c)
                v[static_cast<size_t>(c) * st.cols + r] = value(a)[static_cast<size_t>(r) * s.cols + c];
        int id = push(st, std::move(v), nullptr);
        node(id).backward = [id, a, s, st](Tape& t) {
            const auto& g = t.node(id).grad;
            auto& ga = t.node(a).grad;
            for (int r = 0; r < st.rows; ++r)
                for (int c = 0; c < st.cols; ++c)
                    ga[static_cast<size_t>(c) * s.cols + r] += g[static_cast<size_t>(r) * st.cols + c];
        };
        return id;
    }

    int sum_all(int a) {
        T acc = T(0);
        for (T x : value(a)) acc += x;
        int id = push({1, 1}, {acc}, nullptr);
        node(id).backward = [id, a](Tape& t) {
            T g = t.node(id).grad[0];
            for (auto& gi : t.node(a).grad) gi += g;
        };
        return id;
    }

    int mean_all(int a) {
        int n = shape(a).size();
        T acc = T(0);
        for (T x : value(a)) acc += x;
        acc /= static_cast<T>(n);
        int id = push({1, 1}, {acc}, nullptr);
        node(id).backward = [id, a, n](Tape& t) {
            T g = t.node(id).grad[0] / static_cast<T>(n);
            for (auto& gi : t.node(a).grad) gi += g;
        };
        return id;
    }

    int concat_cols(int a, int b) {
        Shape sa = shape(a), sb = shape(b);
        if (sa.rows != sb.rows)
            throw TensorError("concat_cols: row mismatch " + sa.str() + " vs " + sb.str());
        Shape s{sa.rows, sa.cols + sb.cols};
        std::vector<T> v(static_cast<size_t>(s.size()));
        for (int r = 0; r < s.rows; ++r) {
            for (int c = 0; c < sa.cols; ++c)
                v[static_cast<size_t>(r) * s.cols + c] = value(a)[static_cast<size_t>(r) * sa.cols + c];
            for (int c = 0; c < sb.cols; ++c)
                v[static_cast<size_t>(r) * s.cols + sa.cols + c] = value(b)[static_cast<size_t>(r) * sb.cols + c];
        }
        int id = push(s, std::move(v), nullptr);
        node(id).backward = [id, a, b, sa, sb, s](Tape& t) {
            const auto& g = t.node(id).grad;
            for (int r = 0; r < s.rows; ++r) {
                for (int c = 0; c < sa.cols; ++c)
                    t.node(a).grad[static_cast<size_t>(r) * sa.cols + c] += g[static_cast<size_t>(r) * s.cols + c];
                for (int c = 0; c < sb.cols; ++c)
                    t.node(b).grad[static_cast<size_t>(r) * sb.cols + c] += g[static_cast<size_t>(r) * s.cols + sa.cols + c];
            }
        };
        return id;
    }

    // Stacks k row vectors (each 1 x d) into a k x d matrix.
    int stack_rows(const std::vector<int>& parts) {
        if (parts.empty()) throw TensorError("stack_rows: empty input");
        int d = shape(parts[0]).cols;
        for (int p : parts) {
            if (shape(p).rows != 1 || shape(p).cols != d)
                throw TensorError("stack_rows: every part must be 1x" + std::to_string(d));
        }
        Shape s{static_cast<int>(parts.size()), d};
        std::vector<T> v(static_cast<size_t>(s.size()));
        for (size_t r = 0; r < parts.size(); ++r)
            for (int c = 0; c < d; ++c) v[r * d + c] = value(parts[r])[static_cast<size_t>(c)];
        int id = push(s, std::move(v), nullptr);
        std::vector<int> ps = parts;
        node(id).backward = [id, ps, d](Tape& t) {
            const auto& g = t.node(id).grad;
            for (size_t r = 0; r < ps.size(); ++r)
                for (int c = 0; c < d; ++c)
                    t.node(ps[r]).grad[static_cast<size_t>(c)] += g[r * d + c];
        };
        return id;
    }

    // Column slice [from, to).
    int slice_cols(int a, int from, int to) {
        Shape sa = shape(a);
        if (from < 0 || to > sa.cols || from >= to)
            throw TensorError("slice_cols: bad range on " + sa.str());
        Shape s{sa.rows, to - from};
        std::vector<T> v(static_cast<size_t>(s.size()));
        for (int r = 0; r < s.rows; ++r)
            for (int c = 0; c < s.cols; ++c)
                v[static_cast<size_t>(r) * s.cols + c] = value(a)[static_cast<size_t>(r) * sa.cols + from + c];
        int id = push(s, std::move(v), nullptr);
        node(id).backward = [id, a, sa, s, from](Tape& t) {
            const auto& g = t.node(id).grad;
            for (int r = 0; r < s.rows; ++r)
                for (int c = 0; c < s.cols; ++c)
                    t.node(a).grad[static_cast<size_t>(r) * sa.cols + from + c] += g[static_cast<size_t>(r) * s.cols + c];
        };
        return id;
    }

    int l2_normalize_rows(int a, T eps = T(1e-12)) {
        Shape s = shape(a);
        std::vector<T> v(value(a).size());
        std::vector<T> norms(static_cast<size_t>(s.rows));
        for (int r = 0; r < s.rows; ++r) {
            size_t off = static_cast<size_t>(r) * s.cols;
            T sq = T(0);
            for (int c = 0; c < s.cols; ++c) sq += value(a)[off + c] * value(a)[off + c];
            T n = std::sqrt(sq + eps);
            norms[static_cast<size_t>(r)] = n;
            for (int c = 0; c < s.cols; ++c) v[off + c] = value(a)[off + c] / n;
        }
        int id = push(s, std::move(v), nullptr);
        node(id).backward = [id, a, s, norms](Tape& t) {
            const auto& g = t.node(id).grad;
            const auto& y = t.value(id);
            auto& ga = t.node(a).grad;
            for (int r = 0; r < s.rows; ++r) {
                size_t off = static_cast<size_t>(r) * s.cols;
                T n = norms[static_cast<size_t>(r)];
                T dot = T(0);
                for (int c = 0; c < s.cols; ++c) dot += g[off + c] * y[off + c];
                for (int c = 0; c < s.cols; ++c)
                    ga[off + c] += (g[off + c] - y[off + c] * dot) / n;
            }
        };
        return id;
    }

    // Reverse sweep from a scalar loss. Parameters off the path keep whatever
    // gradient they already had (zero contribution).
    void backward(int loss) {
        if (shape(loss).size() != 1) throw TensorError("backward: loss must be scalar, got " + shape(loss).str());
        node(loss).grad[0] = T(1);
        for (int i = loss; i >= 0; --i) {
            auto& n = nodes_[static_cast<size_t>(i)];
            if (n.backward) n.backward(*this);
        }
    }

    void clear() { nodes_.clear(); }

    Node& node(int i) { return nodes_[static_cast<size_t>(i)]; }

  private:
    int push(Shape s, std::vector<T> v, std::function<void(Tape&)> bw) {
        Node n;
        n.shape = s;
        n.value = std::move(v);
        n.grad.assign(n.value.size(), T(0));
        n.backward = std::move(bw);
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    template <typename F>
    int binary(int a, int b, const char* name, F f, T da, T db) {
        require_same(shape(a), shape(b), name);
        std::vector<T> v(value(a).size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = f(value(a)[i], value(b)[i]);
        int id = push(shape(a), std::move(v), nullptr);
        node(id).backward = [id, a, b, da, db](Tape& t) {
            const auto& g = t.node(id).grad;
            for (size_t i = 0; i < g.size(); ++i) {
                t.node(a).grad[i] += g[i] * da;
                t.node(b).grad[i] += g[i] * db;
            }
        };
        return id;
    }

    std::vector<Node> nodes_;
};

// Seeded parameter initialisation helpers.
template <typename T>
inline void init_uniform(Parameter<T>& p, std::mt19937& rng, double bound) {
    std::uniform_real_distribution<double> d(-bound, bound);
    for (auto& v : p.value) v = static_cast<T>(d(rng));
}

template <typename T>
inline void init_xavier(Parameter<T>& p, std::mt19937& rng) {
    Shape s = p.shape();
    double bound = std::sqrt(6.0 / (s.rows + s.cols));
    init_uniform(p, rng, bound);
}

}  // namespace ppibench::nn
