#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppibench/entries.hpp"
#include "ppibench/heads.hpp"
#include "ppibench/metrics.hpp"
#include "ppibench/optim.hpp"

namespace ppibench::nn {

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    int max_epochs = 30;
    int patience = 5;
    double base_lr = 5e-4;
    long warmup_steps = 1000;
    int grad_accum = 32;
    int per_step_batch = 1;  // fixed at 1; effective batch = grad_accum
    long total_steps = 0;    // 0: constant lr after warmup
    std::vector<uint64_t> seeds = {7, 8, 9};

    AdamConfig adam() const {
        AdamConfig a;
        a.base_lr = base_lr;
        a.warmup_steps = warmup_steps;
        a.total_steps = total_steps;
        return a;
    }
};

struct TrainExample {
    PartnerInput lig;
    PartnerInput rec;
    double pkd = 0.0;
    std::string entry_id;
};

inline TrainExample example_from_entry(const CuratedEntry& e) {
    TrainExample ex;
    ex.entry_id = e.entry_id;
    ex.lig.tokens = tokenize_partner(e.ligand_seqs);
    ex.rec.tokens = tokenize_partner(e.receptor_seqs);
    ex.lig.record_prefix = e.entry_id + "/lig";
    ex.rec.record_prefix = e.entry_id + "/rec";
    ex.pkd = e.pkd;
    return ex;
}

inline std::vector<TrainExample> examples_from_entries(const std::vector<CuratedEntry>& entries) {
    std::vector<TrainExample> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(example_from_entry(e));
    return out;
}

// Early stopping on a metric that must strictly increase to count as an
// improvement. Undefined metric values never improve.
class EarlyStopper {
  public:
    explicit EarlyStopper(int patience) : patience_(patience) {}

    // Returns true when the value improved on the best so far.
    bool observe(double value, bool defined) {
        if (defined && value > best_) {
            best_ = value;
            stale_ = 0;
            return true;
        }
        ++stale_;
        return false;
    }
    bool should_stop() const { return stale_ >= patience_; }
    double best() const { return best_; }
    int stale_epochs() const { return stale_; }

  private:
    int patience_;
    double best_ = -std::numeric_limits<double>::infinity();
    int stale_ = 0;
};

template <typename T>
struct Checkpoint {
    int epoch = 0;
    double val_spearman = 0.0;
    bool val_spearman_defined = false;
    std::vector<std::pair<std::string, std::vector<T>>> values;

    static Checkpoint capture(ModelState<T>& m, int epoch, double rho, bool defined) {
        Checkpoint c;
        c.epoch = epoch;
        c.val_spearman = rho;
        c.val_spearman_defined = defined;
        for (auto* p : m.store.all()) c.values.emplace_back(p->name, p->value);
        return c;
    }
    void restore(ModelState<T>& m) const {
        for (const auto& [name, vals] : values) {
            Parameter<T>* p = m.store.find(name);
            if (!p || p->value.size() != vals.size())
                throw TrainError("checkpoint restore: layout mismatch at " + name);
            p->value = vals;
        }
    }
};

template <typename T>
inline double predict(ModelState<T>& m, const TrainExample& ex) {
    Tape<T> tape;
    int out = forward_arch(tape, m, ex.lig, ex.rec);
    return static_cast<double>(tape.scalar(out));
}

template <typename T>
inline MetricsReport evaluate(ModelState<T>& m, const std::vector<TrainExample>& data,
                              std::vector<double>* predictions = nullptr) {
    if (data.empty()) throw TrainError("evaluate: empty split");
    std::vector<double> pred, target;
    pred.reserve(data.size());
    for (const auto& ex : data) {
        pred.push_back(predict(m, ex));
        target.push_back(ex.pkd);
    }
    if (predictions) *predictions = pred;
    return compute_metrics(pred, target);
}

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;
    double lr = 0.0;
    MetricsReport val;
};

template <typename T>
struct TrainResult {
    Checkpoint<T> best;
    std::vector<EpochStats> history;
    int epochs_run = 0;
    bool early_stopped = false;
};

// MSE training with gradient accumulation, per-epoch validation Spearman,
// strict-improvement early stopping and best-checkpoint selection (ties keep
// the earliest epoch). Throws TrainError as a divergence guard on non-finite
// loss.
template <typename T>
inline TrainResult<T> train_loop(ModelState<T>& m, const std::vector<TrainExample>& train,
                                 const std::vector<TrainExample>& val, const TrainConfig& cfg,
                                 uint64_t seed) {
    if (train.empty() || val.empty()) throw TrainError("train_loop: empty split");
    std::mt19937 rng(static_cast<uint32_t>(seed * 2654435761u + 1));
    AdamState<T> adam(cfg.adam(), m.trainable_params());
    m.store.zero_grad();

    TrainResult<T> result;
    EarlyStopper stopper(cfg.patience);
    std::vector<size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        int pending = 0;
        for (size_t oi = 0; oi < order.size(); ++oi) {
            const TrainExample& ex = train[order[oi]];
            Tape<T> tape;
            int pred = forward_arch(tape, m, ex.lig, ex.rec);
            int target = tape.constant({1, 1}, {static_cast<T>(ex.pkd)});
            int diff = tape.sub(pred, target);
            int loss = tape.mul(diff, diff);
            double lv = static_cast<double>(tape.scalar(loss));
            if (!std::isfinite(lv))
                throw TrainError("non-finite loss at epoch " + std::to_string(epoch) +
                                 ", example " + ex.entry_id);
            loss_sum += lv;
            tape.backward(loss);
            if (++pending == cfg.grad_accum) {
                adam.step(pending);
                m.store.zero_grad();
                pending = 0;
            }
        }
        if (pending > 0) {
            adam.step(pending);
            m.store.zero_grad();
        }

        EpochStats st;
        st.epoch = epoch;
        st.train_mse = loss_sum / static_cast<double>(train.size());
        st.lr = lr_at(cfg.adam(), adam.step_count());
        st.val = evaluate(m, val);
        result.history.push_back(st);
        result.epochs_run = epoch;

        bool improved = stopper.observe(st.val.spearman, st.val.spearman_defined);
        if (improved || result.best.values.empty())
            result.best =
                Checkpoint<T>::capture(m, epoch, st.val.spearman, st.val.spearman_defined);
        if (stopper.should_stop()) {
            result.early_stopped = true;
            break;
        }
    }
    return result;
}

}  // namespace ppibench::nn
