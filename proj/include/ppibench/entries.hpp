#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ppibench/amino.hpp"

namespace ppibench {

struct CurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MutationSpec {
    char chain_id = ' ';
    char wild_aa = ' ';
    int position = 0;  // PDB author numbering
    char mutant_aa = ' ';

    friend bool operator==(const MutationSpec&, const MutationSpec&) = default;
};

struct RawEntry {
    std::string entry_id;
    std::string pdb_id;
    std::vector<char> ligand_chains;
    std::vector<char> receptor_chains;
    std::vector<MutationSpec> mutations;
    std::optional<double> affinity_kd;   // molar; exactly one of kd/pkd is set
    std::optional<double> affinity_pkd;
    std::string method;
    std::string source_db;
};

struct CuratedEntry {
    std::string entry_id;
    std::string pdb_id;
    std::vector<std::string> ligand_seqs;
    std::vector<std::string> receptor_seqs;
    double pkd = 0.0;
    std::string method;
};

struct CurationReport {
    std::vector<std::string> removed_bad_mutation;
    std::vector<std::string> removed_missing_chain;
    std::vector<std::string> removed_malformed;  // unreadable rows (bad kd, bad chain lists)
    std::vector<std::string> case_fixed;
    std::vector<std::string> off_by_one_fixed;
    size_t chains_recovered = 0;
    std::vector<std::string> removed_short;
    size_t merged_duplicates = 0;
    size_t input_count = 0;
    size_t final_count = 0;
    std::vector<std::string> warnings;
};

inline double kd_to_pkd(double kd_molar) {
    if (!(kd_molar > 0.0)) throw CurationError("kd must be positive, got " + std::to_string(kd_molar));
    return -std::log10(kd_molar);
}

// --- entry table (CSV) ---------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur.push_back('"'); ++i; }
                else quoted = false;
            } else cur.push_back(c);
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string strip(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t p = s.find(sep, start);
        if (p == std::string_view::npos) p = s.size();
        std::string piece = strip(s.substr(start, p - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        start = p + 1;
    }
    return out;
}

}  // namespace detail

// Parses one "C_K8E" style token. Returns std::nullopt when malformed or when
// the wild/mutant letters violate the canonical-alphabet / inequality rules.
inline std::optional<MutationSpec> parse_mutation_token(std::string_view tok) {
    if (tok.size() < 5 || tok[1] != '_') return std::nullopt;
    MutationSpec m;
    m.chain_id = tok[0];
    m.wild_aa = tok[2];
    std::string_view rest = tok.substr(3);
    if (rest.size() < 2) return std::nullopt;
    m.mutant_aa = rest.back();
    std::string_view num = rest.substr(0, rest.size() - 1);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), m.position);
    if (ec != std::errc{} || p != num.data() + num.size()) return std::nullopt;
    if (!is_canonical_aa(m.wild_aa) || !is_canonical_aa(m.mutant_aa)) return std::nullopt;
    if (m.wild_aa == m.mutant_aa) return std::nullopt;
    return m;
}

struct EntryTable {
    std::vector<RawEntry> entries;
    // rows dropped at parse time, already bucketed for the curation report
    std::vector<std::string> removed_bad_mutation;
    std::vector<std::string> removed_malformed;
    size_t row_count = 0;
};

// Reads the whole entry table. A missing column is fatal; a row with an
// unparseable mutation token is recorded and dropped (routed to the
// bad-mutation bucket), a row that is otherwise unreadable goes to the
// malformed bucket.
inline EntryTable parse_entry_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CurationError("entry table: empty input");
    auto header = detail::split_csv_line(line);
    std::map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[detail::strip(header[i])] = i;

    auto need = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end()) throw CurationError("entry table: missing column '" + name + "'");
        return it->second;
    };
    size_t c_id = need("entry_id"), c_pdb = need("pdb_id");
    size_t c_lig = need("ligand_chains"), c_rec = need("receptor_chains");
    size_t c_mut = need("mutations"), c_method = need("method"), c_src = need("source_db");
    std::optional<size_t> c_kd, c_pkd;
    if (col.count("kd_molar")) c_kd = col["kd_molar"];
    if (col.count("pkd")) c_pkd = col["pkd"];
    if (!c_kd && !c_pkd) throw CurationError("entry table: need a 'kd_molar' or 'pkd' column");

    EntryTable out;
    while (std::getline(in, line)) {
        if (detail::strip(line).empty()) continue;
        ++out.row_count;
        auto f = detail::split_csv_line(line);
        auto field = [&](size_t i) { return i < f.size() ? detail::strip(f[i]) : std::string(); };

        RawEntry e;
        e.entry_id = field(c_id);
        e.pdb_id = field(c_pdb);
        e.method = field(c_method);
        e.source_db = field(c_src);
        for (const auto& ch : detail::split_on(field(c_lig), ','))
            if (ch.size() == 1) e.ligand_chains.push_back(ch[0]);
        for (const auto& ch : detail::split_on(field(c_rec), ','))
            if (ch.size() == 1) e.receptor_chains.push_back(ch[0]);

        bool chains_ok = !e.ligand_chains.empty() && !e.receptor_chains.empty();
        for (char lc : e.ligand_chains)
            for (char rc : e.receptor_chains)
                if (lc == rc) chains_ok = false;
        if (!chains_ok) {
            out.removed_malformed.push_back(e.entry_id);
            continue;
        }

        std::string kd_s = c_kd ? field(*c_kd) : std::string();
        std::string pkd_s = c_pkd ? field(*c_pkd) : std::string();
        try {
            if (!kd_s.empty() && pkd_s.empty()) {
                double kd = std::stod(kd_s);
                if (!(kd > 0.0)) throw CurationError("kd must be positive");
                e.affinity_kd = kd;
            } else if (kd_s.empty() && !pkd_s.empty()) {
                e.affinity_pkd = std::stod(pkd_s);
            } else {
                throw CurationError("need exactly one of kd/pkd");
            }
        } catch (const std::exception&) {
            out.removed_malformed.push_back(e.entry_id);
            continue;
        }

        bool bad_mutation = false;
        for (const auto& tok : detail::split_on(field(c_mut), ';')) {
            auto m = parse_mutation_token(tok);
            if (!m) { bad_mutation = true; break; }
            e.mutations.push_back(*m);
        }
        if (bad_mutation) {
            out.removed_bad_mutation.push_back(e.entry_id);
            continue;
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

// --- curated JSONL -------------------------------------------------------

inline nlohmann::json to_json(const CuratedEntry& e) {
    return nlohmann::json{{"entry_id", e.entry_id},   {"pdb_id", e.pdb_id},
                          {"ligand_seqs", e.ligand_seqs}, {"receptor_seqs", e.receptor_seqs},
                          {"pkd", e.pkd},             {"method", e.method}};
}

inline CuratedEntry curated_from_json(const nlohmann::json& j) {
    CuratedEntry e;
    e.entry_id = j.at("entry_id").get<std::string>();
    e.pdb_id = j.at("pdb_id").get<std::string>();
    e.ligand_seqs = j.at("ligand_seqs").get<std::vector<std::string>>();
    e.receptor_seqs = j.at("receptor_seqs").get<std::vector<std::string>>();
    e.pkd = j.at("pkd").get<double>();
    e.method = j.at("method").get<std::string>();
    return e;
}

inline void write_curated_jsonl(std::ostream& out, const std::vector<CuratedEntry>& entries) {
    for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

inline std::vector<CuratedEntry> read_curated_jsonl(std::istream& in) {
    std::vector<CuratedEntry> out;
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (detail::strip(line).empty()) continue;
        try {
            out.push_back(curated_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& ex) {
            throw CurationError("curated jsonl line " + std::to_string(n) + ": " + ex.what());
        }
    }
    return out;
}

inline nlohmann::json to_json(const CurationReport& r) {
    return nlohmann::json{
        {"removed_bad_mutation", r.removed_bad_mutation},
        {"removed_missing_chain", r.removed_missing_chain},
        {"removed_malformed", r.removed_malformed},
        {"case_fixed", r.case_fixed},
        {"off_by_one_fixed", r.off_by_one_fixed},
        {"chains_recovered", r.chains_recovered},
        {"removed_short", r.removed_short},
        {"merged_duplicates", r.merged_duplicates},
        {"input_count", r.input_count},
        {"final_count", r.final_count},
        {"warnings", r.warnings},
    };
}

}  // namespace ppibench
