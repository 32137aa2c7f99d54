#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ppibench/split.hpp"
#include "support/fixtures.hpp"

using namespace ppibench;

namespace {

CuratedEntry entry(std::string id, std::string pdb, std::vector<std::string> lig,
                   std::vector<std::string> rec, double pkd = 7.0) {
    CuratedEntry e;
    e.entry_id = std::move(id);
    e.pdb_id = std::move(pdb);
    e.ligand_seqs = std::move(lig);
    e.receptor_seqs = std::move(rec);
    e.pkd = pkd;
    e.method = "SPR";
    return e;
}

std::vector<Cluster> singleton_clusters(size_t n) {
    std::vector<Cluster> out;
    for (size_t i = 0; i < n; ++i) out.push_back({static_cast<int>(i), {static_cast<int>(i)}});
    return out;
}

}  // namespace

TEST_CASE("entry representative is the plain concatenation") {
    std::string a(40, 'A'), c(40, 'C');
    auto e = entry("R1", "1AAA", {a}, {c});
    CHECK(entry_representative_sequence(e) == a + c);
    CHECK(entry_representative_sequence(e).size() == 80);

    auto three = entry("R2", "1AAB", {a, c}, {std::string(25 + 15, 'W')});
    CHECK(entry_representative_sequence(three).size() == 40 + 40 + 40);
    CHECK(entry_representative_sequence(three) ==
          entry_representative_sequence(three));  // deterministic
}

TEST_CASE("initial split stops once the target fraction is reached") {
    SECTION("one giant component crossing the line alone") {
        std::mt19937 rng(1);
        std::vector<CuratedEntry> entries;
        // 8 entries share one pdb (one component), 2 singletons
        for (int i = 0; i < 8; ++i)
            entries.push_back(entry("G" + std::to_string(i), "PBIG",
                                    {fixture::random_sequence(rng, 40)},
                                    {fixture::random_sequence(rng, 40)}));
        entries.push_back(entry("S1", "PS1", {fixture::random_sequence(rng, 40)},
                                {fixture::random_sequence(rng, 40)}));
        entries.push_back(entry("S2", "PS2", {fixture::random_sequence(rng, 40)},
                                {fixture::random_sequence(rng, 40)}));
        SplitConfig cfg;
        auto a = initial_split(entries, singleton_clusters(entries.size()), cfg);
        CHECK(a.count(Split::train) == 8);
        for (int i = 0; i < 8; ++i)
            CHECK(a.assignment.at("G" + std::to_string(i)) == Split::train);
    }
    SECTION("100 singletons: exactly the first 75 by entry id") {
        std::mt19937 rng(2);
        std::vector<CuratedEntry> entries;
        for (int i = 0; i < 100; ++i) {
            char id[8];
            std::snprintf(id, sizeof(id), "E%03d", i);
            entries.push_back(entry(id, "P" + std::to_string(i),
                                    {fixture::random_sequence(rng, 40)},
                                    {fixture::random_sequence(rng, 40)}));
        }
        SplitConfig cfg;
        auto a = initial_split(entries, singleton_clusters(entries.size()), cfg);
        CHECK(a.count(Split::train) == 75);
        CHECK(a.assignment.at("E000") == Split::train);
        CHECK(a.assignment.at("E074") == Split::train);
        CHECK(a.assignment.at("E075") != Split::train);
    }
    SECTION("shared pdb id fuses clusters into one coherent unit") {
        std::mt19937 rng(3);
        std::vector<CuratedEntry> entries;
        entries.push_back(entry("A1", "PSHR", {fixture::random_sequence(rng, 40)},
                                {fixture::random_sequence(rng, 40)}));
        entries.push_back(entry("A2", "PSHR", {fixture::random_sequence(rng, 40)},
                                {fixture::random_sequence(rng, 40)}));
        entries.push_back(entry("B1", "POTH", {fixture::random_sequence(rng, 40)},
                                {fixture::random_sequence(rng, 40)}));
        SplitConfig cfg;
        auto a = initial_split(entries, singleton_clusters(entries.size()), cfg);
        CHECK(a.assignment.at("A1") == a.assignment.at("A2"));
        CHECK(pdb_coherent(a, entries));
    }
}

TEST_CASE("leakage purge pulls similar entries and their pdb siblings") {
    std::mt19937 rng(4);
    std::string t_seq = fixture::random_sequence(rng, 60);
    std::string y_seq = fixture::random_sequence(rng, 60);
    std::vector<CuratedEntry> entries;
    entries.push_back(entry("T", "PT", {t_seq}, {t_seq}));
    entries.push_back(entry("X", "PXY", {fixture::mutate_sequence(t_seq, 0.1, rng)},
                            {fixture::mutate_sequence(t_seq, 0.1, rng)}));
    entries.push_back(entry("Y", "PXY", {y_seq}, {y_seq}));
    entries.push_back(entry("Z", "PZ", {fixture::mutate_sequence(y_seq, 0.1, rng)},
                            {fixture::mutate_sequence(y_seq, 0.1, rng)}));
    entries.push_back(entry("Q", "PQ", {fixture::random_sequence(rng, 60)},
                            {fixture::random_sequence(rng, 60)}));

    SplitConfig cfg;
    IdentityCache ids(entries, cfg.align);
    // sanity preconditions of the engineered chain
    REQUIRE(ids.identity(1, 0) > cfg.identity_threshold);   // X ~ T
    REQUIRE(ids.identity(2, 0) <= cfg.identity_threshold);  // Y !~ T
    REQUIRE(ids.identity(3, 2) > cfg.identity_threshold);   // Z ~ Y
    REQUIRE(ids.identity(3, 0) <= cfg.identity_threshold);  // Z !~ T
    REQUIRE(ids.identity(4, 0) <= cfg.identity_threshold);  // Q clean

    SplitAssignment a;
    a.assignment = {{"T", Split::train}, {"X", Split::val}, {"Y", Split::val},
                    {"Z", Split::val},  {"Q", Split::val}};
    auto purged = leakage_purge(a, entries, ids, cfg);
    CHECK(purged.assignment.at("X") == Split::train);
    CHECK(purged.assignment.at("Y") == Split::train);  // dragged by pdb PXY
    CHECK(purged.assignment.at("Z") == Split::train);  // chases Y on iteration 2
    CHECK(purged.assignment.at("Q") == Split::val);
    CHECK(purged.purge_moves == 3);

    double before = 1.0 / 5.0;
    CHECK(purged.fraction(Split::train) >= before);  // monotone
}

TEST_CASE("final partition balances val and test") {
    std::mt19937 rng(5);
    SECTION("four singleton components alternate 2/2") {
        std::vector<CuratedEntry> entries;
        for (int i = 0; i < 4; ++i)
            entries.push_back(entry("E" + std::to_string(i), "P" + std::to_string(i),
                                    {fixture::random_sequence(rng, 50)},
                                    {fixture::random_sequence(rng, 50)}));
        SplitAssignment a;
        for (const auto& e : entries) a.assignment[e.entry_id] = Split::val;
        SplitConfig cfg;
        auto out = final_partition(a, entries, cfg);
        CHECK(out.count(Split::val) == 2);
        CHECK(out.count(Split::test) == 2);
    }
    SECTION("one 10-entry family against ten singletons") {
        std::vector<CuratedEntry> entries;
        std::string base = fixture::random_sequence(rng, 60);
        for (int i = 0; i < 10; ++i)
            entries.push_back(entry("F" + std::to_string(i), "PF" + std::to_string(i),
                                    {fixture::mutate_sequence(base, 0.05, rng)},
                                    {fixture::mutate_sequence(base, 0.05, rng)}));
        for (int i = 0; i < 10; ++i)
            entries.push_back(entry("S" + std::to_string(i), "PS" + std::to_string(i),
                                    {fixture::random_sequence(rng, 60)},
                                    {fixture::random_sequence(rng, 60)}));
        SplitAssignment a;
        for (const auto& e : entries) a.assignment[e.entry_id] = Split::val;
        SplitConfig cfg;
        auto out = final_partition(a, entries, cfg);
        // family goes to val first (larger component), singletons fill test
        for (int i = 0; i < 10; ++i) CHECK(out.assignment.at("F" + std::to_string(i)) == Split::val);
        CHECK(out.count(Split::val) == 10);
        CHECK(out.count(Split::test) == 10);
    }
    SECTION("pdb-linked components land on one side") {
        std::vector<CuratedEntry> entries;
        entries.push_back(entry("L1", "PLNK", {fixture::random_sequence(rng, 50)},
                                {fixture::random_sequence(rng, 50)}));
        entries.push_back(entry("L2", "PLNK", {fixture::random_sequence(rng, 50)},
                                {fixture::random_sequence(rng, 50)}));
        entries.push_back(entry("M1", "PM", {fixture::random_sequence(rng, 50)},
                                {fixture::random_sequence(rng, 50)}));
        SplitAssignment a;
        for (const auto& e : entries) a.assignment[e.entry_id] = Split::val;
        SplitConfig cfg;
        auto out = final_partition(a, entries, cfg);
        CHECK(out.assignment.at("L1") == out.assignment.at("L2"));
    }
}

TEST_CASE("verify_no_leakage catches injected violations") {
    std::mt19937 rng(6);
    std::string base = fixture::random_sequence(rng, 60);
    std::vector<CuratedEntry> entries;
    entries.push_back(entry("T1", "P1", {base}, {base}));
    entries.push_back(entry("V1", "P2", {fixture::random_sequence(rng, 60)},
                            {fixture::random_sequence(rng, 60)}));
    entries.push_back(entry("V2", "P3", {fixture::mutate_sequence(base, 0.02, rng)},
                            {fixture::mutate_sequence(base, 0.02, rng)}));
    SplitConfig cfg;
    IdentityCache ids(entries, cfg.align);

    SplitAssignment clean;
    clean.assignment = {{"T1", Split::train}, {"V1", Split::val}, {"V2", Split::train}};
    CHECK(verify_no_leakage(clean, entries, ids, cfg).violations.empty());

    SplitAssignment corrupted;
    corrupted.assignment = {{"T1", Split::train}, {"V1", Split::val}, {"V2", Split::test}};
    auto rep = verify_no_leakage(corrupted, entries, ids, cfg);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].eval_entry == "V2");
    CHECK(rep.violations[0].train_entry == "T1");
    CHECK(rep.max_cross_identity > 0.9);

    SplitAssignment all_train;
    all_train.assignment = {{"T1", Split::train}, {"V1", Split::train}, {"V2", Split::train}};
    CHECK(verify_no_leakage(all_train, entries, ids, cfg).violations.empty());
}

TEST_CASE("full split pipeline on a planted corpus") {
    fixture::PlantedConfig pc;
    pc.families = 10;
    pc.per_family = 6;
    auto entries = fixture::make_planted_corpus(pc);

    SplitConfig cfg;
    IdentityCache ids(entries, cfg.align);
    auto a = run_split(entries, cfg, &ids);

    CHECK(a.assignment.size() == entries.size());
    CHECK(pdb_coherent(a, entries));
    CHECK(a.fraction(Split::train) >= cfg.train_target_fraction);
    CHECK(verify_no_leakage(a, entries, ids, cfg).violations.empty());
    CHECK(a.count(Split::val) + a.count(Split::test) > 0);

    auto b = run_split(entries, cfg);
    CHECK(a.assignment == b.assignment);  // determinism
    CHECK(a.purge_moves == b.purge_moves);

    // val and test both populated on this corpus, reasonably balanced
    CHECK(a.count(Split::val) > 0);
    CHECK(a.count(Split::test) > 0);
}

TEST_CASE("split json round trip") {
    SplitAssignment a;
    a.assignment = {{"A", Split::train}, {"B", Split::val}, {"C", Split::test}};
    a.purge_moves = 5;
    auto j = to_json(a);
    auto back = split_from_json(j);
    CHECK(back.assignment == a.assignment);
    CHECK(back.purge_moves == 5);
    CHECK(j.at("stats").at("train") == 1);
}
