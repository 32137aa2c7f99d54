#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ppibench/tensor.hpp"

namespace ppibench::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double base_lr = 5e-4;
    long warmup_steps = 1000;
    long total_steps = 0;  // >0: linear decay to zero after warmup; 0: constant
};

// Linear warmup to base_lr, then either constant or linear decay to zero at
// total_steps. `step` is the 1-based optimizer step counter.
inline double lr_at(const AdamConfig& cfg, long step) {
    if (cfg.warmup_steps > 0 && step < cfg.warmup_steps)
        return cfg.base_lr * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
    if (cfg.total_steps > cfg.warmup_steps) {
        double rest = static_cast<double>(cfg.total_steps - step) /
                      static_cast<double>(cfg.total_steps - cfg.warmup_steps);
        return cfg.base_lr * std::max(0.0, rest);
    }
    return cfg.base_lr;
}

// Adam over one parameter group. Moment buffers are allocated lazily and
// shaped identically to their parameters.
template <typename T>
class AdamState {
  public:
    AdamState(AdamConfig cfg, std::vector<Parameter<T>*> params)
        : cfg_(cfg), params_(std::move(params)) {
        for (auto* p : params_) {
            m_.emplace_back(p->size(), T(0));
            v_.emplace_back(p->size(), T(0));
        }
    }

    long step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

    // Applies one update. Gradients are expected to be SUMS over accum_count
    // micro-batches; they are divided by accum_count here and zeroed after.
    void step(int accum_count) {
        if (accum_count < 1) throw TensorError("adam_step: accum_count must be >= 1");
        ++step_;
        double lr = lr_at(cfg_, step_);
        double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (size_t pi = 0; pi < params_.size(); ++pi) {
            Parameter<T>& p = *params_[pi];
            auto& m = m_[pi];
            auto& v = v_[pi];
            for (size_t i = 0; i < p.size(); ++i) {
                double g = static_cast<double>(p.grad[i]) / accum_count;
                double mi = cfg_.beta1 * static_cast<double>(m[i]) + (1.0 - cfg_.beta1) * g;
                double vi = cfg_.beta2 * static_cast<double>(v[i]) + (1.0 - cfg_.beta2) * g * g;
                m[i] = static_cast<T>(mi);
                v[i] = static_cast<T>(vi);
                double mhat = mi / bc1;
                double vhat = vi / bc2;
                p.value[i] -= static_cast<T>(lr * mhat / (std::sqrt(vhat) + cfg_.epsilon));
            }
            p.zero_grad();
        }
    }

  private:
    AdamConfig cfg_;
    std::vector<Parameter<T>*> params_;
    std::vector<std::vector<T>> m_, v_;
    long step_ = 0;
};

}  // namespace ppibench::nn
