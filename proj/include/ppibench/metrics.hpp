#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace ppibench {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricsReport {
    double spearman = 0.0;
    double pearson = 0.0;
    double rmse = 0.0;
    size_t n = 0;
    // zero-variance / too-short inputs leave the correlation undefined; the
    // value then carries 0 and the flag is cleared
    bool spearman_defined = true;
    bool pearson_defined = true;
};

inline double mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size() || pred.empty())
        throw MetricsError("mse: need equal nonzero lengths");
    double acc = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

inline double rmse(std::span<const double> pred, std::span<const double> target) {
    return std::sqrt(mse_loss(pred, target));
}

// Average (fractional) ranks, 1-based; ties share the mean of their span.
inline std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size(), 0.0);
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Sample Pearson correlation, two-pass in double. Sets *defined=false on
// n < 2 or zero variance instead of throwing.
inline double pearson(std::span<const double> x, std::span<const double> y,
                      bool* defined = nullptr) {
    if (x.size() != y.size()) throw MetricsError("pearson: length mismatch");
    if (defined) *defined = true;
    if (x.size() < 2) {
        if (defined) *defined = false;
        return 0.0;
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (defined) *defined = false;
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

// Spearman rho: Pearson of average-ranked values.
inline double spearman(std::span<const double> x, std::span<const double> y,
                       bool* defined = nullptr) {
    if (x.size() != y.size()) throw MetricsError("spearman: length mismatch");
    if (x.size() < 2) {
        if (defined) *defined = false;
        return 0.0;
    }
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson(rx, ry, defined);
}

inline MetricsReport compute_metrics(std::span<const double> pred, std::span<const double> target) {
    MetricsReport r;
    r.n = pred.size();
    r.rmse = rmse(pred, target);
    r.pearson = pearson(pred, target, &r.pearson_defined);
    r.spearman = spearman(pred, target, &r.spearman_defined);
    return r;
}

// Mean and sample standard deviation across independent runs (seeds).
struct MetricAggregate {
    double mean = 0.0;
    double sd = 0.0;
};

inline MetricAggregate aggregate_values(std::span<const double> values) {
    MetricAggregate a;
    if (values.empty()) return a;
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - a.mean) * (v - a.mean);
        a.sd = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    return a;
}

struct AggregateReport {
    MetricAggregate spearman, pearson, rmse;
    size_t runs = 0;
};

inline AggregateReport aggregate_reports(const std::vector<MetricsReport>& reports) {
    std::vector<double> s, p, r;
    for (const auto& m : reports) {
        s.push_back(m.spearman);
        p.push_back(m.pearson);
        r.push_back(m.rmse);
    }
    AggregateReport out;
    out.spearman = aggregate_values(s);
    out.pearson = aggregate_values(p);
    out.rmse = aggregate_values(r);
    out.runs = reports.size();
    return out;
}

inline nlohmann::json to_json(const MetricsReport& m) {
    return nlohmann::json{{"spearman", m.spearman},
                          {"pearson", m.pearson},
                          {"rmse", m.rmse},
                          {"n", m.n},
                          {"spearman_defined", m.spearman_defined},
                          {"pearson_defined", m.pearson_defined}};
}

}  // namespace ppibench
