#pragma once

// Shared fixture builders: synthesized PDB files, the 12-entry curation
// corpus, and the synthetic datasets used by split and training tests.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ppibench/amino.hpp"
#include "ppibench/entries.hpp"

namespace fixture {

namespace fs = std::filesystem;

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        auto base = fs::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            fs::path p = base / ("ppibench_" + tag + "_" + std::to_string(i));
            std::error_code ec;
            if (fs::create_directory(p, ec)) {
                path_ = p;
                return;
            }
        }
        throw std::runtime_error("TempDir: cannot create scratch directory");
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

  private:
    fs::path path_;
};

inline std::string one_to_three(char aa) {
    static const std::map<char, std::string> table = {
        {'A', "ALA"}, {'R', "ARG"}, {'N', "ASN"}, {'D', "ASP"}, {'C', "CYS"},
        {'Q', "GLN"}, {'E', "GLU"}, {'G', "GLY"}, {'H', "HIS"}, {'I', "ILE"},
        {'L', "LEU"}, {'K', "LYS"}, {'M', "MET"}, {'F', "PHE"}, {'P', "PRO"},
        {'S', "SER"}, {'T', "THR"}, {'W', "TRP"}, {'Y', "TYR"}, {'V', "VAL"},
        {'X', "UNK"}};
    return table.at(aa);
}

struct FixtureChain {
    char id = 'A';
    std::string full_seq;            // author positions start_num .. start_num+len-1
    std::vector<int> missing;        // author positions absent from ATOM records
    bool with_seqres = true;
    int start_num = 1;
};

// Emits SEQRES and two ATOM records (N, CA) per present residue in PDB
// fixed-column layout.
inline std::string make_pdb_text(const std::vector<FixtureChain>& chains) {
    std::string out;
    char buf[128];
    for (const auto& ch : chains) {
        if (!ch.with_seqres) continue;
        int ser = 1;
        for (size_t i = 0; i < ch.full_seq.size(); i += 13) {
            std::string names;
            for (size_t j = i; j < std::min(ch.full_seq.size(), i + 13); ++j) {
                if (!names.empty()) names += " ";
                names += one_to_three(ch.full_seq[j]);
            }
            std::snprintf(buf, sizeof(buf), "SEQRES%4d %c%5d  %s\n", ser++, ch.id,
                          static_cast<int>(ch.full_seq.size()), names.c_str());
            out += buf;
        }
    }
    int serial = 1;
    for (const auto& ch : chains) {
        std::set<int> gone(ch.missing.begin(), ch.missing.end());
        for (size_t i = 0; i < ch.full_seq.size(); ++i) {
            int res_seq = ch.start_num + static_cast<int>(i);
            if (gone.count(res_seq)) continue;
            std::string res = one_to_three(ch.full_seq[i]);
            for (const char* atom : {" N  ", " CA "}) {
                std::snprintf(buf, sizeof(buf),
                              "ATOM  %5d %s %3s %c%4d    %8.3f%8.3f%8.3f  1.00  0.00\n", serial++,
                              atom, res.c_str(), ch.id, res_seq, 1.0 * res_seq, 2.0, 3.0);
                out += buf;
            }
        }
        out += "TER\n";
    }
    out += "END\n";
    return out;
}

inline void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("fixture: cannot write " + p.string());
}

inline std::string random_sequence(std::mt19937& rng, size_t len) {
    std::uniform_int_distribution<size_t> pick(0, ppibench::kCanonicalAlphabet.size() - 1);
    std::string s;
    s.reserve(len);
    for (size_t i = 0; i < len; ++i) s.push_back(ppibench::kCanonicalAlphabet[pick(rng)]);
    return s;
}

inline std::string mutate_sequence(std::string s, double rate, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<size_t> pick(0, ppibench::kCanonicalAlphabet.size() - 1);
    for (auto& c : s)
        if (u(rng) < rate) c = ppibench::kCanonicalAlphabet[pick(rng)];
    return s;
}

// --- 12-entry curation corpus ------------------------------------------------
// E01 wild-type mismatch (removed)        E07+E08 duplicates (merged, mean pkd)
// E02 missing chain (removed)             E09 short ligand chain (removed)
// E03 lowercase duplicate fixed (kept)    E10 short receptor chain (removed)
// E04 3QIB/ATLAS off-by-one (corrected)   E11 exact 40-residue boundary (kept)
// E05,E06 ATOM gaps recovered from SEQRES E12 plain entry (kept)

struct CurationFixture {
    fs::path pdb_dir;
    std::string csv;
    // hand-tracked expectations
    size_t input_count = 12;
    std::vector<std::string> expect_final_ids;
    double expect_merged_pkd = 8.5;
    std::map<std::string, std::vector<std::string>> expect_lig_seqs;
    std::map<std::string, std::vector<std::string>> expect_rec_seqs;
};

inline CurationFixture build_curation_fixture(const fs::path& dir) {
    CurationFixture fx;
    fx.pdb_dir = dir;
    std::mt19937 rng(20240901u);

    auto seq = [&](size_t len) { return random_sequence(rng, len); };

    // 9QIW: chain C carries L at author position 8, so the claimed K8E is wrong
    std::string qiw_a = seq(45), qiw_c = seq(45);
    qiw_c[7] = 'L';
    write_file(dir / "9qiw.pdb", make_pdb_text({{'A', qiw_a}, {'C', qiw_c}}));

    // 9KVE: has chains E and L only; the entry also asks for H
    std::string kve_e = seq(48), kve_l = seq(44);
    write_file(dir / "9kve.pdb", make_pdb_text({{'E', kve_e}, {'L', kve_l}}));

    // 9SAB: entry lists [A, a] but only A exists
    std::string sab_a = seq(46), sab_b = seq(52);
    write_file(dir / "9sab.pdb", make_pdb_text({{'A', sab_a}, {'B', sab_b}}));

    // 3QIB: K sits at position 9; the ATLAS annotation says 8
    std::string qib_c = seq(45), qib_d = seq(47);
    qib_c[7] = 'A';
    qib_c[8] = 'K';
    write_file(dir / "3qib.pdb", make_pdb_text({{'C', qib_c}, {'D', qib_d}}));

    // 9RC1 / 9RC2: chain A has two internal residues only in SEQRES
    std::string rc1_a = seq(45), rc1_b = seq(43);
    write_file(dir / "9rc1.pdb",
               make_pdb_text({{'A', rc1_a, {20, 21}}, {'B', rc1_b, {}, false}}));
    std::string rc2_a = seq(50), rc2_b = seq(41);
    write_file(dir / "9rc2.pdb",
               make_pdb_text({{'A', rc2_a, {7}}, {'B', rc2_b, {}, false}}));

    // 9DUP: two entries with identical sequences, SPR and ITC
    std::string dup_a = seq(55), dup_b = seq(60);
    write_file(dir / "9dup.pdb", make_pdb_text({{'A', dup_a}, {'B', dup_b}}));

    // 9SH1 / 9SH2: one partner chain below the 40-residue floor
    std::string sh1_a = seq(39), sh1_b = seq(50);
    write_file(dir / "9sh1.pdb", make_pdb_text({{'A', sh1_a}, {'B', sh1_b}}));
    std::string sh2_a = seq(47), sh2_b = seq(20);
    write_file(dir / "9sh2.pdb", make_pdb_text({{'A', sh2_a}, {'B', sh2_b}}));

    // 9OKA: both chains exactly 40 residues (boundary, kept)
    std::string oka_a = seq(40), oka_b = seq(40);
    write_file(dir / "9oka.pdb", make_pdb_text({{'A', oka_a}, {'B', oka_b}}));

    // 9OKB: unremarkable entry
    std::string okb_a = seq(63), okb_b = seq(58);
    write_file(dir / "9okb.pdb", make_pdb_text({{'A', okb_a}, {'B', okb_b}}));

    std::string qib_c_mut = qib_c;
    qib_c_mut[8] = 'E';  // K9E after the +1 correction

    fx.csv =
        "entry_id,pdb_id,ligand_chains,receptor_chains,mutations,kd_molar,pkd,method,source_db\n"
        "E01,9QIW,A,C,C_K8E,1e-7,,SPR,SKEMPI2\n"
        "E02,9KVE,\"E, H\",L,,1e-6,,SPR,SAbDab\n"
        "E03,9SAB,\"A, a\",B,,1e-8,,SPR,SAbDab\n"
        "E04,3QIB,C,D,C_K8E,,7.25,ITC,ATLAS\n"
        "E05,9RC1,A,B,,1e-9,,SPR,PDBbind\n"
        "E06,9RC2,A,B,,,6.5,ITC,PDBbind\n"
        "E07,9DUP,A,B,,1e-8,,SPR,SKEMPI2\n"
        "E08,9DUP,A,B,,,9.0,ITC,SKEMPI2\n"
        "E09,9SH1,A,B,,1e-5,,SPR,PDBbind\n"
        "E10,9SH2,A,B,,1e-5,,SPR,PDBbind\n"
        "E11,9OKA,A,B,,,5.0,SPR,PDBbind\n"
        "E12,9OKB,A,B,,,8.1,Unknown,PDBbind\n";

    fx.expect_final_ids = {"E03", "E04", "E05", "E06", "E07", "E11", "E12"};
    fx.expect_lig_seqs = {
        {"E03", {sab_a}}, {"E04", {qib_c_mut}}, {"E05", {rc1_a}}, {"E06", {rc2_a}},
        {"E07", {dup_a}}, {"E11", {oka_a}},     {"E12", {okb_a}},
    };
    fx.expect_rec_seqs = {
        {"E03", {sab_b}}, {"E04", {qib_d}}, {"E05", {rc1_b}}, {"E06", {rc2_b}},
        {"E07", {dup_b}}, {"E11", {oka_b}}, {"E12", {okb_b}},
    };
    return fx;
}

// --- synthetic datasets ---------------------------------------------------

// Smooth deterministic label: a linear function of residue-class fractions
// over all chains. Sequences are drawn with a per-entry composition bias so
// the signal dominates multinomial noise.
inline double composition_pkd(const ppibench::CuratedEntry& e) {
    size_t total = 0, kr = 0, de = 0, hydro = 0;
    auto tally = [&](const std::string& s) {
        for (char c : s) {
            ++total;
            if (c == 'K' || c == 'R') ++kr;
            else if (c == 'D' || c == 'E') ++de;
            else if (c == 'F' || c == 'W' || c == 'Y' || c == 'I' || c == 'L' || c == 'V') ++hydro;
        }
    };
    for (const auto& s : e.ligand_seqs) tally(s);
    for (const auto& s : e.receptor_seqs) tally(s);
    double t = static_cast<double>(total);
    return 2.0 + 40.0 * kr / t - 20.0 * de / t + 10.0 * hydro / t;
}

struct SynthConfig {
    int n = 600;
    uint64_t seed = 20240902u;
    int min_len = 40;
    int max_len = 56;
    double two_chain_prob = 0.3;
};

inline std::vector<ppibench::CuratedEntry> make_synthetic_dataset(const SynthConfig& cfg = {}) {
    std::mt19937 rng(static_cast<uint32_t>(cfg.seed));
    std::uniform_int_distribution<int> len(cfg.min_len, cfg.max_len);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<size_t> pick(0, ppibench::kCanonicalAlphabet.size() - 1);

    auto biased_seq = [&](int n, double kr_bias) {
        std::string s;
        s.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            if (u(rng) < kr_bias) s.push_back(u(rng) < 0.5 ? 'K' : 'R');
            else s.push_back(ppibench::kCanonicalAlphabet[pick(rng)]);
        }
        return s;
    };

    std::vector<ppibench::CuratedEntry> out;
    for (int i = 0; i < cfg.n; ++i) {
        ppibench::CuratedEntry e;
        char id[16];
        std::snprintf(id, sizeof(id), "S%04d", i);
        e.entry_id = id;
        e.pdb_id = "Z" + std::to_string(i);
        e.method = "synthetic";
        double bias = 0.02 + 0.28 * u(rng);
        e.ligand_seqs.push_back(biased_seq(len(rng), bias));
        if (u(rng) < cfg.two_chain_prob) e.ligand_seqs.push_back(biased_seq(len(rng), bias));
        e.receptor_seqs.push_back(biased_seq(len(rng), bias));
        if (u(rng) < cfg.two_chain_prob) e.receptor_seqs.push_back(biased_seq(len(rng), bias));
        e.pkd = composition_pkd(e);
        out.push_back(std::move(e));
    }
    return out;
}

// Corpus with planted families: high identity inside a family, background
// identity across families, plus pdb links that exercise coherency merging.
struct PlantedConfig {
    int families = 25;
    int per_family = 8;   // 200 entries
    int chain_len = 60;
    double mutation_rate = 0.08;
    uint64_t seed = 20240903u;
};

inline std::vector<ppibench::CuratedEntry> make_planted_corpus(const PlantedConfig& cfg = {}) {
    std::mt19937 rng(static_cast<uint32_t>(cfg.seed));
    std::vector<ppibench::CuratedEntry> out;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int f = 0; f < cfg.families; ++f) {
        std::string base_l = random_sequence(rng, static_cast<size_t>(cfg.chain_len));
        std::string base_r = random_sequence(rng, static_cast<size_t>(cfg.chain_len));
        for (int k = 0; k < cfg.per_family; ++k) {
            ppibench::CuratedEntry e;
            char id[24];
            std::snprintf(id, sizeof(id), "F%02dM%02d", f, k);
            e.entry_id = id;
            // members 0 and 1 of each family share a pdb id; families 0 and 1
            // additionally share one pdb across families
            if (k <= 1 && f <= 1) e.pdb_id = "PX00";
            else if (k <= 1) e.pdb_id = "PF" + std::to_string(f);
            else e.pdb_id = "P" + std::to_string(f) + "_" + std::to_string(k);
            e.method = "synthetic";
            e.ligand_seqs.push_back(mutate_sequence(base_l, cfg.mutation_rate, rng));
            e.receptor_seqs.push_back(mutate_sequence(base_r, cfg.mutation_rate, rng));
            e.pkd = 4.0 + 8.0 * u(rng);
            out.push_back(std::move(e));
        }
    }
    return out;
}

}  // namespace fixture
