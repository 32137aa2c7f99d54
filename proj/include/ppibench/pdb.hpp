#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppibench/amino.hpp"

namespace ppibench {

struct PdbError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One ATOM-derived residue. res_seq uses PDB author numbering and may be
// negative; insertion_code is '\0' when absent.
struct ResidueRecord {
    char chain_id = ' ';
    int res_seq = 0;
    char insertion_code = '\0';
    char aa = kUnknownResidue;

    friend bool operator==(const ResidueRecord&, const ResidueRecord&) = default;
};

struct ChainData {
    char chain_id = ' ';
    std::vector<ResidueRecord> atom_residues;  // file order, deduplicated
    std::string atom_seq;                      // derived, one letter per residue
    std::optional<std::string> seqres_seq;
};

struct PdbStructure {
    std::string pdb_id;  // uppercased, 4 characters
    std::map<char, ChainData> chains;

    const ChainData* find_chain(char id) const {
        auto it = chains.find(id);
        return it == chains.end() ? nullptr : &it->second;
    }
};

// Per-line recoverable problems (bad fixed columns etc.); the offending
// line is skipped.
struct PdbParseReport {
    struct LineError {
        size_t line_no;
        std::string message;
    };
    std::vector<LineError> line_errors;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Fixed-column slice, 1-based inclusive columns as in the PDB format spec.
// Lines may be shorter than 80 columns; missing tail is empty.
inline std::string_view columns(std::string_view line, size_t from, size_t to) {
    if (line.size() < from) return {};
    return line.substr(from - 1, std::min(to, line.size()) - (from - 1));
}

inline bool parse_int(std::string_view s, int& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

// Parses PDB fixed-column text. Only ATOM, SEQRES, TER and ENDMDL records
// are interpreted; HETATM and everything else is skipped. Parsing stops at
// the first ENDMDL, so multi-model files contribute their first model only.
// One residue per distinct (chain, res_seq, icode), first occurrence wins,
// which also makes the result altloc-invariant.
inline PdbStructure parse_pdb(std::string_view text, std::string pdb_id,
                              PdbParseReport* report = nullptr) {
    PdbStructure out;
    std::transform(pdb_id.begin(), pdb_id.end(), pdb_id.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out.pdb_id = std::move(pdb_id);

    std::set<std::tuple<char, int, char>> seen;
    std::map<char, std::string> seqres;

    size_t line_no = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;

        std::string_view rec = detail::columns(line, 1, 6);
        if (rec.rfind("ENDMDL", 0) == 0) break;
        if (rec.rfind("ATOM", 0) == 0 && (rec.size() == 4 || rec[4] == ' ')) {
            if (line.size() < 27) {
                if (report) report->line_errors.push_back({line_no, "ATOM line too short"});
                continue;
            }
            std::string_view res_name = detail::trim(detail::columns(line, 18, 20));
            char chain = line[21];
            int res_seq = 0;
            if (!detail::parse_int(detail::columns(line, 23, 26), res_seq)) {
                if (report) report->line_errors.push_back({line_no, "non-numeric residue number"});
                continue;
            }
            char icode = line[26] == ' ' ? '\0' : line[26];
            if (!seen.insert({chain, res_seq, icode}).second) continue;

            ChainData& cd = out.chains[chain];
            cd.chain_id = chain;
            ResidueRecord r{chain, res_seq, icode, three_to_one(res_name)};
            cd.atom_residues.push_back(r);
            cd.atom_seq.push_back(r.aa);
        } else if (rec.rfind("SEQRES", 0) == 0) {
            if (line.size() < 12) {
                if (report) report->line_errors.push_back({line_no, "SEQRES line too short"});
                continue;
            }
            char chain = line[11];
            std::string_view names = line.substr(19);
            std::string& seq = seqres[chain];
            std::istringstream iss{std::string(names)};
            std::string tok;
            while (iss >> tok) seq.push_back(three_to_one(tok));
        }
        // TER is recognized but carries no sequence information.
    }

    for (auto& [chain, seq] : seqres) {
        if (seq.empty()) continue;
        ChainData& cd = out.chains[chain];
        cd.chain_id = chain;
        cd.seqres_seq = seq;
    }

    size_t n_atom = 0;
    for (const auto& [id, cd] : out.chains) n_atom += cd.atom_residues.size();
    if (n_atom == 0) throw PdbError("PDB " + out.pdb_id + ": no ATOM residues parsed");
    return out;
}

// Locates <pdb_dir>/<pdbid>.pdb with case-insensitive id lookup.
inline std::filesystem::path find_pdb_file(const std::filesystem::path& dir, std::string_view pdb_id) {
    std::string lower(pdb_id), upper(pdb_id);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (const auto& name : {std::string(pdb_id), lower, upper}) {
        auto p = dir / (name + ".pdb");
        if (std::filesystem::exists(p)) return p;
    }
    throw PdbError("no PDB file for id '" + std::string(pdb_id) + "' in " + dir.string());
}

inline PdbStructure load_pdb(const std::filesystem::path& dir, std::string_view pdb_id,
                             PdbParseReport* report = nullptr) {
    auto path = find_pdb_file(dir, pdb_id);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PdbError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pdb(ss.str(), std::string(pdb_id), report);
}

}  // namespace ppibench
