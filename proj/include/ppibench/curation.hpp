#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppibench/alignment.hpp"
#include "ppibench/entries.hpp"
#include "ppibench/pdb.hpp"

namespace ppibench {

// --- mutation position corrections ----------------------------------------

// Systematic annotation fixes, keyed on (pdb_id, source_db, chain). The one
// known case is 3QIB/ATLAS chain C, whose mutation sites are shifted by one.
struct OffByOneRule {
    std::string pdb_id;
    std::string source_db;
    char chain_id = ' ';
    int delta = 1;
};

inline std::vector<OffByOneRule> default_offset_rules() {
    return {{"3QIB", "ATLAS", 'C', 1}};
}

// Returns true when any mutation position was shifted.
inline bool apply_off_by_one_correction(RawEntry& e,
                                        const std::vector<OffByOneRule>& rules = default_offset_rules()) {
    bool changed = false;
    for (const auto& r : rules) {
        if (e.pdb_id != r.pdb_id || e.source_db != r.source_db) continue;
        for (auto& m : e.mutations) {
            if (m.chain_id == r.chain_id) {
                m.position += r.delta;
                changed = true;
            }
        }
    }
    return changed;
}

// --- entry validation ------------------------------------------------------

enum class MutationCheck { pass, missing_chain, missing_position, wild_type_mismatch };

inline MutationCheck validate_mutation(const RawEntry& e, const PdbStructure& s) {
    for (const auto& m : e.mutations) {
        const ChainData* cd = s.find_chain(m.chain_id);
        if (!cd) return MutationCheck::missing_chain;
        const ResidueRecord* hit = nullptr;
        for (const auto& r : cd->atom_residues) {
            if (r.res_seq == m.position && r.insertion_code == '\0') {
                hit = &r;
                break;
            }
        }
        if (!hit) return MutationCheck::missing_position;
        if (hit->aa != m.wild_aa) return MutationCheck::wild_type_mismatch;
    }
    return MutationCheck::pass;
}

enum class ChainCheck { pass, fixed, fail };

// Drops references to non-existent lowercase duplicates of an existing
// uppercase chain (the SAbDab 'A'/'a' annotation artifact); any other missing
// chain fails the entry.
inline ChainCheck validate_chains(RawEntry& e, const PdbStructure& s) {
    bool fixed = false;
    auto scrub = [&](std::vector<char>& chains) {
        std::vector<char> kept;
        for (char c : chains) {
            if (s.find_chain(c)) {
                kept.push_back(c);
                continue;
            }
            char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            bool duplicate_case = std::islower(static_cast<unsigned char>(c)) && upper != c &&
                                  std::find(chains.begin(), chains.end(), upper) != chains.end() &&
                                  s.find_chain(upper) != nullptr;
            if (duplicate_case) fixed = true;   // drop the phantom lowercase id
            else kept.push_back(c);             // keep; resolved to fail below
        }
        chains = std::move(kept);
    };
    scrub(e.ligand_chains);
    scrub(e.receptor_chains);
    for (char c : e.ligand_chains)
        if (!s.find_chain(c)) return ChainCheck::fail;
    for (char c : e.receptor_chains)
        if (!s.find_chain(c)) return ChainCheck::fail;
    if (e.ligand_chains.empty() || e.receptor_chains.empty()) return ChainCheck::fail;
    return fixed ? ChainCheck::fixed : ChainCheck::pass;
}

// --- missing-residue recovery ----------------------------------------------

struct RecoveredChain {
    std::string seq;
    std::map<int, size_t> pos_map;  // author res_seq (no icode) -> index into seq
    bool recovered_any = false;     // seq differs from the raw ATOM-derived one
    std::optional<std::string> warning;
};

// Fills ATOM-record gaps from SEQRES. The ATOM sequence is globally aligned
// against SEQRES (match +1, mismatch -1, gap -2, 'X' wildcard 0); if identity
// over the aligned columns is below 0.9 the SEQRES record is considered
// unrelated and the ATOM sequence is returned with a warning. Otherwise the
// output takes the ATOM residue wherever one aligned (so mutations keep
// pointing at observed residues) and the SEQRES residue for every gap.
inline RecoveredChain recover_missing_residues(const ChainData& chain) {
    RecoveredChain out;
    auto map_from_atoms = [&]() {
        out.seq = chain.atom_seq;
        for (size_t i = 0; i < chain.atom_residues.size(); ++i) {
            const auto& r = chain.atom_residues[i];
            if (r.insertion_code == '\0') out.pos_map.emplace(r.res_seq, i);
        }
    };
    if (!chain.seqres_seq || chain.seqres_seq->empty()) {
        map_from_atoms();
        return out;
    }
    const std::string& seqres = *chain.seqres_seq;
    auto cols = global_align(chain.atom_seq, seqres);

    size_t aligned = 0, matched = 0;
    for (const auto& c : cols) {
        if (c.i >= 0 && c.j >= 0) {
            ++aligned;
            char x = chain.atom_seq[static_cast<size_t>(c.i)];
            char y = seqres[static_cast<size_t>(c.j)];
            if (x == y || x == 'X' || y == 'X') ++matched;
        }
    }
    double identity = aligned == 0 ? 0.0 : static_cast<double>(matched) / aligned;
    if (identity < 0.9) {
        map_from_atoms();
        out.warning = "chain " + std::string(1, chain.chain_id) +
                      ": SEQRES/ATOM identity " + std::to_string(identity) +
                      " below 0.9, keeping ATOM sequence";
        return out;
    }

    for (const auto& c : cols) {
        if (c.i >= 0) {
            const auto& r = chain.atom_residues[static_cast<size_t>(c.i)];
            if (r.insertion_code == '\0') out.pos_map.emplace(r.res_seq, out.seq.size());
            out.seq.push_back(chain.atom_seq[static_cast<size_t>(c.i)]);
        } else {
            out.seq.push_back(seqres[static_cast<size_t>(c.j)]);
        }
    }
    out.recovered_any = out.seq != chain.atom_seq;
    return out;
}

// Applies validated point mutations through the recovered-position map.
// Throws when a position is unmapped or two specs collide on one position.
inline std::string apply_mutations(std::string recovered, const std::map<int, size_t>& pos_map,
                                   const std::vector<MutationSpec>& specs) {
    std::set<size_t> touched;
    for (const auto& m : specs) {
        auto it = pos_map.find(m.position);
        if (it == pos_map.end())
            throw CurationError("mutation position " + std::to_string(m.position) + " not mapped");
        if (!touched.insert(it->second).second)
            throw CurationError("colliding mutations at position " + std::to_string(m.position));
        recovered[it->second] = m.mutant_aa;
    }
    return recovered;
}

// --- dataset-level filters ---------------------------------------------------

inline constexpr size_t kMinChainLength = 40;

inline bool has_short_chain(const CuratedEntry& e) {
    for (const auto& s : e.ligand_seqs)
        if (s.size() < kMinChainLength) return true;
    for (const auto& s : e.receptor_seqs)
        if (s.size() < kMinChainLength) return true;
    return false;
}

inline std::vector<CuratedEntry> filter_short_chains(std::vector<CuratedEntry> entries,
                                                     std::vector<std::string>* removed = nullptr) {
    std::vector<CuratedEntry> kept;
    for (auto& e : entries) {
        if (has_short_chain(e)) {
            if (removed) removed->push_back(e.entry_id);
        } else {
            kept.push_back(std::move(e));
        }
    }
    return kept;
}

// Merges entries with identical sequence content. The group key ignores chain
// order within a partner but keeps partner roles apart. Unknown/Other-method
// members are discarded whenever a group also holds an explicitly measured
// one; survivors are averaged in pKd space.
inline std::vector<CuratedEntry> deduplicate_entries(std::vector<CuratedEntry> entries,
                                                     size_t* merged_count = nullptr) {
    using Key = std::pair<std::vector<std::string>, std::vector<std::string>>;
    std::map<Key, std::vector<CuratedEntry>> groups;
    for (auto& e : entries) {
        Key k{e.ligand_seqs, e.receptor_seqs};
        std::sort(k.first.begin(), k.first.end());
        std::sort(k.second.begin(), k.second.end());
        groups[std::move(k)].push_back(std::move(e));
    }

    auto is_unreliable = [](const std::string& m) { return m == "Unknown" || m == "Other"; };
    std::vector<CuratedEntry> out;
    size_t merged = 0;
    for (auto& [key, group] : groups) {
        std::vector<CuratedEntry>* pool = &group;
        std::vector<CuratedEntry> reliable;
        for (auto& e : group)
            if (!is_unreliable(e.method)) reliable.push_back(e);
        if (!reliable.empty()) pool = &reliable;

        const CuratedEntry* rep = &(*pool)[0];
        double pkd_sum = 0.0;
        std::set<std::string> methods;
        for (const auto& e : *pool) {
            pkd_sum += e.pkd;
            methods.insert(e.method);
            if (e.entry_id < rep->entry_id) rep = &e;
        }
        CuratedEntry merged_entry = *rep;
        merged_entry.pkd = pkd_sum / static_cast<double>(pool->size());
        std::string joined;
        for (const auto& m : methods) {
            if (!joined.empty()) joined += ";";
            joined += m;
        }
        merged_entry.method = joined;
        merged += group.size() - 1;  // everything absorbed, reliable or not
        out.push_back(std::move(merged_entry));
    }
    if (merged_count) *merged_count = merged;
    std::sort(out.begin(), out.end(),
              [](const CuratedEntry& a, const CuratedEntry& b) { return a.entry_id < b.entry_id; });
    return out;
}

// --- full pipeline ----------------------------------------------------------

using StructureProvider = std::function<const PdbStructure*(const std::string& pdb_id)>;

struct CurationOutcome {
    std::vector<CuratedEntry> entries;
    CurationReport report;
};

inline CurationOutcome run_curation(EntryTable table, const StructureProvider& structures,
                                    const std::vector<OffByOneRule>& rules = default_offset_rules()) {
    CurationOutcome out;
    CurationReport& rep = out.report;
    rep.input_count = table.row_count;
    rep.removed_bad_mutation = table.removed_bad_mutation;
    rep.removed_malformed = table.removed_malformed;

    std::vector<CuratedEntry> candidates;
    for (auto& e : table.entries) {
        if (apply_off_by_one_correction(e, rules)) rep.off_by_one_fixed.push_back(e.entry_id);

        const PdbStructure* s = structures(e.pdb_id);
        if (!s) {
            rep.removed_missing_chain.push_back(e.entry_id);
            continue;
        }
        ChainCheck cc = validate_chains(e, *s);
        if (cc == ChainCheck::fail) {
            rep.removed_missing_chain.push_back(e.entry_id);
            continue;
        }
        if (cc == ChainCheck::fixed) rep.case_fixed.push_back(e.entry_id);

        if (validate_mutation(e, *s) != MutationCheck::pass) {
            rep.removed_bad_mutation.push_back(e.entry_id);
            continue;
        }

        CuratedEntry ce;
        ce.entry_id = e.entry_id;
        ce.pdb_id = e.pdb_id;
        ce.method = e.method;
        ce.pkd = e.affinity_pkd ? *e.affinity_pkd : kd_to_pkd(*e.affinity_kd);

        bool ok = true;
        auto build = [&](const std::vector<char>& chains, std::vector<std::string>& seqs) {
            for (char cid : chains) {
                const ChainData* cd = s->find_chain(cid);
                RecoveredChain rc = recover_missing_residues(*cd);
                if (rc.recovered_any) ++rep.chains_recovered;
                if (rc.warning) rep.warnings.push_back(e.entry_id + ": " + *rc.warning);
                std::vector<MutationSpec> chain_specs;
                for (const auto& m : e.mutations)
                    if (m.chain_id == cid) chain_specs.push_back(m);
                try {
                    seqs.push_back(apply_mutations(rc.seq, rc.pos_map, chain_specs));
                } catch (const CurationError& ex) {
                    rep.removed_bad_mutation.push_back(e.entry_id);
                    rep.warnings.push_back(e.entry_id + ": " + ex.what());
                    ok = false;
                    return;
                }
            }
        };
        build(e.ligand_chains, ce.ligand_seqs);
        if (ok) build(e.receptor_chains, ce.receptor_seqs);
        if (!ok) continue;
        candidates.push_back(std::move(ce));
    }

    candidates = filter_short_chains(std::move(candidates), &rep.removed_short);
    out.entries = deduplicate_entries(std::move(candidates), &rep.merged_duplicates);
    rep.final_count = out.entries.size();
    return out;
}

}  // namespace ppibench
