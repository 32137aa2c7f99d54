#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ppibench/cluster.hpp"
#include "ppibench/entries.hpp"

namespace ppibench {

enum class Split { train, val, test };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

struct SplitConfig {
    double identity_threshold = 0.30;
    double train_target_fraction = 0.75;
    uint64_t seed = 0;  // carried in reports; the split itself is deterministic
    AlignParams align;
    bool exact_clustering = true;
};

struct SplitAssignment {
    std::map<std::string, Split> assignment;  // entry_id -> split
    size_t purge_moves = 0;

    size_t count(Split s) const {
        size_t n = 0;
        for (const auto& [id, sp] : assignment)
            if (sp == s) ++n;
        return n;
    }
    double fraction(Split s) const {
        return assignment.empty() ? 0.0
                                  : static_cast<double>(count(s)) / assignment.size();
    }
};

// One representative sequence per entry: all ligand chains then all receptor
// chains, stored order, no separators.
inline std::string entry_representative_sequence(const CuratedEntry& e) {
    std::string s;
    for (const auto& c : e.ligand_seqs) s += c;
    for (const auto& c : e.receptor_seqs) s += c;
    return s;
}

// Memoizing identity lookup over the entries' representative sequences.
// Identical strings share one slot so repeated pairs align only once.
class IdentityCache {
  public:
    IdentityCache(const std::vector<CuratedEntry>& entries, AlignParams params)
        : params_(params) {
        for (const auto& e : entries) {
            std::string rep = entry_representative_sequence(e);
            auto [it, fresh] = string_ids_.emplace(rep, static_cast<int>(uniques_.size()));
            if (fresh) uniques_.push_back(std::move(rep));
            entry_slot_.push_back(it->second);
        }
    }

    double identity(size_t entry_a, size_t entry_b) {
        int a = entry_slot_[entry_a], b = entry_slot_[entry_b];
        if (a > b) std::swap(a, b);
        if (a == b) return 1.0;
        uint64_t key = (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        double v = smith_waterman(uniques_[a], uniques_[b], params_).identity;
        cache_.emplace(key, v);
        return v;
    }

    const std::string& representative(size_t entry) const { return uniques_[entry_slot_[entry]]; }

  private:
    AlignParams params_;
    std::vector<std::string> uniques_;
    std::map<std::string, int> string_ids_;
    std::vector<int> entry_slot_;
    std::unordered_map<uint64_t, double> cache_;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct CoherencyComponent {
    std::vector<size_t> entries;        // entry indices
    std::string smallest_entry_id;
};

// Merges clusters that share a pdb_id into single assignable units and
// orders them largest-first (entry count desc, then smallest entry_id).
inline std::vector<CoherencyComponent> coherency_components(
    const std::vector<CuratedEntry>& entries, const std::vector<Cluster>& clusters) {
    UnionFind uf(clusters.size());
    std::map<std::string, int> pdb_first;  // pdb_id -> first cluster seen
    std::vector<int> cluster_of(entries.size(), -1);
    for (size_t c = 0; c < clusters.size(); ++c)
        for (int m : clusters[c].members) cluster_of[static_cast<size_t>(m)] = static_cast<int>(c);
    for (size_t i = 0; i < entries.size(); ++i) {
        auto [it, fresh] = pdb_first.emplace(entries[i].pdb_id, cluster_of[i]);
        if (!fresh) uf.unite(it->second, cluster_of[i]);
    }
    std::map<int, CoherencyComponent> comps;
    for (size_t i = 0; i < entries.size(); ++i) {
        auto& comp = comps[uf.find(cluster_of[i])];
        comp.entries.push_back(i);
        if (comp.smallest_entry_id.empty() || entries[i].entry_id < comp.smallest_entry_id)
            comp.smallest_entry_id = entries[i].entry_id;
    }
    std::vector<CoherencyComponent> out;
    for (auto& [root, comp] : comps) out.push_back(std::move(comp));
    std::sort(out.begin(), out.end(), [](const CoherencyComponent& a, const CoherencyComponent& b) {
        if (a.entries.size() != b.entries.size()) return a.entries.size() > b.entries.size();
        return a.smallest_entry_id < b.smallest_entry_id;
    });
    return out;
}

}  // namespace detail

// Stage 1: assign whole coherency components to train, largest first, until
// the train fraction reaches the target. Everything else stays in a remainder
// pool (returned as val; the final partition reassigns it).
inline SplitAssignment initial_split(const std::vector<CuratedEntry>& entries,
                                     const std::vector<Cluster>& clusters, const SplitConfig& cfg) {
    SplitAssignment out;
    auto comps = detail::coherency_components(entries, clusters);
    size_t total = entries.size(), in_train = 0;
    for (const auto& comp : comps) {
        bool to_train =
            total > 0 && static_cast<double>(in_train) / total < cfg.train_target_fraction;
        for (size_t i : comp.entries)
            out.assignment[entries[i].entry_id] = to_train ? Split::train : Split::val;
        if (to_train) in_train += comp.entries.size();
    }
    return out;
}

// Stage 2: iteratively pull remainder entries whose representative exceeds
// the identity threshold against any train representative into train,
// dragging all PDB siblings along, until a fixpoint.
inline SplitAssignment leakage_purge(SplitAssignment assignment,
                                     const std::vector<CuratedEntry>& entries, IdentityCache& ids,
                                     const SplitConfig& cfg) {
    std::map<std::string, std::vector<size_t>> by_pdb;
    for (size_t i = 0; i < entries.size(); ++i) by_pdb[entries[i].pdb_id].push_back(i);

    bool moved_any = true;
    while (moved_any) {
        moved_any = false;
        std::vector<size_t> train_idx, rest_idx;
        for (size_t i = 0; i < entries.size(); ++i) {
            (assignment.assignment.at(entries[i].entry_id) == Split::train ? train_idx : rest_idx)
                .push_back(i);
        }
        for (size_t r : rest_idx) {
            if (assignment.assignment.at(entries[r].entry_id) == Split::train) continue;
            bool leaks = false;
            for (size_t t : train_idx) {
                if (ids.identity(r, t) > cfg.identity_threshold) {
                    leaks = true;
                    break;
                }
            }
            if (!leaks) continue;
            for (size_t sib : by_pdb[entries[r].pdb_id]) {
                auto& slot = assignment.assignment.at(entries[sib].entry_id);
                if (slot != Split::train) {
                    slot = Split::train;
                    ++assignment.purge_moves;
                    moved_any = true;
                }
            }
        }
    }
    return assignment;
}

// Stage 3: re-cluster the remainder at the same threshold, merge into PDB
// coherency components, and hand each component (largest first) to whichever
// of val/test currently holds fewer entries; ties go to val.
inline SplitAssignment final_partition(SplitAssignment assignment,
                                       const std::vector<CuratedEntry>& entries,
                                       const SplitConfig& cfg) {
    std::vector<size_t> rest;
    for (size_t i = 0; i < entries.size(); ++i)
        if (assignment.assignment.at(entries[i].entry_id) != Split::train) rest.push_back(i);
    if (rest.empty()) return assignment;

    std::vector<CuratedEntry> rest_entries;
    std::vector<std::string> rest_reps;
    for (size_t i : rest) {
        rest_entries.push_back(entries[i]);
        rest_reps.push_back(entry_representative_sequence(entries[i]));
    }
    ClusterConfig cc;
    cc.threshold = cfg.identity_threshold;
    cc.align = cfg.align;
    cc.exact = cfg.exact_clustering;
    auto clusters = greedy_cluster(rest_reps, cc);
    auto comps = detail::coherency_components(rest_entries, clusters);

    size_t n_val = 0, n_test = 0;
    for (const auto& comp : comps) {
        Split target = n_val <= n_test ? Split::val : Split::test;
        for (size_t local : comp.entries)
            assignment.assignment.at(rest_entries[local].entry_id) = target;
        (target == Split::val ? n_val : n_test) += comp.entries.size();
    }
    return assignment;
}

struct LeakageReport {
    struct Violation {
        std::string eval_entry;
        std::string train_entry;
        double identity;
    };
    std::vector<Violation> violations;
    double max_cross_identity = 0.0;
};

// Exhaustive post-hoc check of every val/test representative against every
// train representative.
inline LeakageReport verify_no_leakage(const SplitAssignment& assignment,
                                       const std::vector<CuratedEntry>& entries, IdentityCache& ids,
                                       const SplitConfig& cfg) {
    LeakageReport rep;
    std::vector<size_t> train_idx, eval_idx;
    for (size_t i = 0; i < entries.size(); ++i) {
        (assignment.assignment.at(entries[i].entry_id) == Split::train ? train_idx : eval_idx)
            .push_back(i);
    }
    for (size_t e : eval_idx) {
        for (size_t t : train_idx) {
            double id = ids.identity(e, t);
            rep.max_cross_identity = std::max(rep.max_cross_identity, id);
            if (id > cfg.identity_threshold)
                rep.violations.push_back({entries[e].entry_id, entries[t].entry_id, id});
        }
    }
    return rep;
}

inline bool pdb_coherent(const SplitAssignment& assignment,
                         const std::vector<CuratedEntry>& entries) {
    std::map<std::string, Split> seen;
    for (const auto& e : entries) {
        auto it = assignment.assignment.find(e.entry_id);
        if (it == assignment.assignment.end()) return false;
        auto [slot, fresh] = seen.emplace(e.pdb_id, it->second);
        if (!fresh && slot->second != it->second) return false;
    }
    return true;
}

// Full two-stage split over curated entries.
inline SplitAssignment run_split(const std::vector<CuratedEntry>& entries, const SplitConfig& cfg,
                                 IdentityCache* cache_out = nullptr) {
    std::vector<std::string> reps;
    for (const auto& e : entries) reps.push_back(entry_representative_sequence(e));
    ClusterConfig cc;
    cc.threshold = cfg.identity_threshold;
    cc.align = cfg.align;
    cc.exact = cfg.exact_clustering;
    auto clusters = greedy_cluster(reps, cc);

    IdentityCache local(entries, cfg.align);
    IdentityCache& ids = cache_out ? *cache_out : local;
    auto assignment = initial_split(entries, clusters, cfg);
    assignment = leakage_purge(std::move(assignment), entries, ids, cfg);
    assignment = final_partition(std::move(assignment), entries, cfg);
    return assignment;
}

inline nlohmann::json to_json(const SplitAssignment& a) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [id, s] : a.assignment) m[id] = split_name(s);
    return nlohmann::json{
        {"assignment", m},
        {"stats",
         {{"train", a.count(Split::train)},
          {"val", a.count(Split::val)},
          {"test", a.count(Split::test)},
          {"train_fraction", a.fraction(Split::train)},
          {"val_fraction", a.fraction(Split::val)},
          {"test_fraction", a.fraction(Split::test)}}},
        {"purge_moves", a.purge_moves},
    };
}

inline SplitAssignment split_from_json(const nlohmann::json& j) {
    SplitAssignment a;
    for (const auto& [id, name] : j.at("assignment").items()) {
        std::string n = name.get<std::string>();
        a.assignment[id] = n == "train" ? Split::train : n == "val" ? Split::val : Split::test;
    }
    a.purge_moves = j.value("purge_moves", 0u);
    return a;
}

}  // namespace ppibench
