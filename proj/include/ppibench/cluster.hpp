#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ppibench/alignment.hpp"

namespace ppibench {

struct Cluster {
    int representative = -1;       // index into the input sequence list
    std::vector<int> members;      // includes the representative
};

// True iff the k-mer sets of a and b share at least min_shared elements.
// This is a heuristic gate: a false result does NOT imply identity below any
// particular threshold, so exact callers must not prune on it.
inline bool kmer_prefilter(std::string_view a, std::string_view b, int k = 5, int min_shared = 1) {
    if (k < 1) return true;
    if (static_cast<int>(a.size()) < k || static_cast<int>(b.size()) < k) return false;
    std::set<std::string_view> ka;
    for (size_t i = 0; i + k <= a.size(); ++i) ka.insert(a.substr(i, k));
    int shared = 0;
    std::set<std::string_view> counted;
    for (size_t i = 0; i + k <= b.size(); ++i) {
        auto kb = b.substr(i, k);
        if (ka.count(kb) && counted.insert(kb).second) {
            if (++shared >= min_shared) return true;
        }
    }
    return false;
}

inline int shared_kmer_count(std::string_view a, std::string_view b, int k = 5) {
    if (static_cast<int>(a.size()) < k || static_cast<int>(b.size()) < k) return 0;
    std::set<std::string_view> ka;
    for (size_t i = 0; i + k <= a.size(); ++i) ka.insert(a.substr(i, k));
    std::set<std::string_view> shared;
    for (size_t i = 0; i + k <= b.size(); ++i) {
        auto kb = b.substr(i, k);
        if (ka.count(kb)) shared.insert(kb);
    }
    return static_cast<int>(shared.size());
}

struct ClusterConfig {
    double threshold = 0.30;
    AlignParams align;
    bool exact = true;  // exact: scan representatives strictly in creation order
    int kmer_k = 5;
};

// Greedy representative clustering. Sequences are processed sorted by
// (length desc, lexicographic asc). In exact mode each sequence joins the
// first existing cluster (creation order) whose representative aligns at
// identity >= threshold, else founds a new cluster. In heuristic mode the
// candidate representatives are visited ordered by shared k-mer count
// (descending, creation order on ties) so likely hits align first; cluster
// assignments may differ from exact mode but membership identity >= threshold
// still holds for every member.
inline std::vector<Cluster> greedy_cluster(const std::vector<std::string>& seqs,
                                           const ClusterConfig& cfg = {}) {
    std::vector<int> order(seqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (seqs[x].size() != seqs[y].size()) return seqs[x].size() > seqs[y].size();
        if (seqs[x] != seqs[y]) return seqs[x] < seqs[y];
        return x < y;
    });

    std::vector<Cluster> clusters;
    for (int si : order) {
        const std::string& s = seqs[si];
        std::vector<int> scan(clusters.size());
        std::iota(scan.begin(), scan.end(), 0);
        if (!cfg.exact) {
            std::vector<int> kmers(clusters.size());
            for (size_t c = 0; c < clusters.size(); ++c)
                kmers[c] = shared_kmer_count(s, seqs[clusters[c].representative], cfg.kmer_k);
            std::stable_sort(scan.begin(), scan.end(),
                             [&](int x, int y) { return kmers[x] > kmers[y]; });
        }
        int joined = -1;
        for (int c : scan) {
            const std::string& rep = seqs[clusters[c].representative];
            if (smith_waterman(s, rep, cfg.align).identity >= cfg.threshold) {
                joined = c;
                break;
            }
        }
        if (joined >= 0) {
            clusters[joined].members.push_back(si);
        } else {
            clusters.push_back({si, {si}});
        }
    }
    return clusters;
}

}  // namespace ppibench
