#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ppibench {

// Residue alphabet: 20 canonical one-letter codes plus 'X' for anything
// nonstandard or unknown.
inline constexpr std::string_view kCanonicalAlphabet = "ACDEFGHIKLMNPQRSTVWY";
inline constexpr char kUnknownResidue = 'X';

inline bool is_canonical_aa(char c) {
    return kCanonicalAlphabet.find(c) != std::string_view::npos;
}

inline bool is_valid_aa(char c) { return c == kUnknownResidue || is_canonical_aa(c); }

inline bool is_valid_sequence(std::string_view seq) {
    for (char c : seq) {
        if (!is_valid_aa(c)) return false;
    }
    return true;
}

// Three-letter residue name to one-letter code. Total function: the 20
// standard names map to their codes, MSE (selenomethionine) maps to M,
// everything else (including SEC/PYL and ligand codes) maps to 'X'.
inline char three_to_one(std::string_view code) {
    struct Entry {
        std::string_view name;
        char aa;
    };
    static constexpr std::array<Entry, 21> table = {{
        {"ALA", 'A'}, {"ARG", 'R'}, {"ASN", 'N'}, {"ASP", 'D'}, {"CYS", 'C'},
        {"GLN", 'Q'}, {"GLU", 'E'}, {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'},
        {"LEU", 'L'}, {"LYS", 'K'}, {"MET", 'M'}, {"PHE", 'F'}, {"PRO", 'P'},
        {"SER", 'S'}, {"THR", 'T'}, {"TRP", 'W'}, {"TYR", 'Y'}, {"VAL", 'V'},
        {"MSE", 'M'},
    }};
    for (const auto& e : table) {
        if (e.name == code) return e.aa;
    }
    return kUnknownResidue;
}

}  // namespace ppibench
