#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/seeds.hpp"
#include "edsketch/calibrate.hpp"
#include "edsketch/errors.hpp"
#include "edsketch/pipeline.hpp"

using namespace edsketch;

namespace {

const PrimeField& F() { return PrimeField::default_field(); }

// Smallest profile whose dense sketches fit in memory: c_k = 1, ĉ_load = 2,
// c_κ = 16 at P = 1.
Profile tiny_profile() {
    Profile p;
    p.name = "tiny";
    p.c_split = 1.0 / 32;
    p.c_eh = 0.05;
    p.rho = 1;
    return p;
}

// A string of length n and a copy with `edits` random edits whose DP edit
// distance is at most `max_ed` (resampled otherwise), both within length n.
std::pair<SymString, SymString> near_pair(std::mt19937_64& rng, uint64_t n, unsigned edits, uint64_t max_ed) {
    for (;;) {
        SymString x = random_symbols(rng, n - edits, 26);
        SymString y = apply_random_edits(rng, x, edits, 26);
        if (y.size() <= n && edit_distance_dp(x, y) <= max_ed) return {x, y};
    }
}

}  // namespace

TEST(DeriveParams, FormulaExamples) {
    Params a = params_formula(8, 8192, 16, desk_profile());
    EXPECT_EQ(a.t[0], 4096u);
    EXPECT_EQ(a.d, 12u);
    EXPECT_EQ(a.t[12], 1u);

    Params b = params_formula(1, 1024, 1, desk_profile());
    EXPECT_EQ(b.t[0], 32u);
    EXPECT_EQ(b.d, 5u);
    EXPECT_EQ(b.R_gram, 24u);
    EXPECT_EQ(b.R_loc, 200u);

    // Exact asymptotic constants at n = 2^20: κ_0/t_0 = 512·ĉ_split·P·log¹²n up to the
    // two power-of-two roundings, and every level halves.
    const uint64_t n = uint64_t{1} << 20;
    Profile pp = paper_profile(n);
    Params c = params_formula(4, n, 2, pp);
    double ratio = std::ldexp(1.0, static_cast<int>(c.kappa_bits[0])) / static_cast<double>(c.t[0]);
    double shape = 512.0 * pp.c_split * 2 * std::pow(20.0, 12);
    EXPECT_GE(ratio, shape);
    EXPECT_LT(ratio, 4 * shape);
    for (unsigned i = 1; i <= c.d; ++i) {
        EXPECT_EQ(c.kappa_bits[i] + 1, c.kappa_bits[i - 1]);
        EXPECT_EQ(c.k_bits[i] + 1, c.k_bits[i - 1]);
        EXPECT_EQ(c.t[i] * 2, c.t[i - 1]);
    }
}

TEST(DeriveParams, ConstraintsAreChecked) {
    EXPECT_THROW(derive_params(0, 1024, 1.5, desk_profile()), ConstraintViolated);
    EXPECT_THROW(derive_params(2, 1000, 1.5, desk_profile()), ConstraintViolated);
    Profile bad = desk_profile();
    bad.c_eh = 100;
    try {
        derive_params(2, 1024, 1.5, bad);
        FAIL() << "expected ConstraintViolated";
    } catch (const ConstraintViolated& e) {
        EXPECT_NE(std::string(e.what()).find("c_EH"), std::string::npos);
    }
    EXPECT_THROW(derive_params(2, 4096, 1.5, paper_profile(4096)), FieldTooSmall);

    Params p = derive_params(8, 1024, 1.5, desk_profile());
    EXPECT_FALSE(p.trivial);
    EXPECT_EQ(p.t[0], 256u);
    EXPECT_EQ(p.t[p.d], 1u);
    EXPECT_EQ(make_layout(p).location.size(), p.d * p.s);

    // k ≥ n/(40P): each string is its own sketch.
    Params t = derive_params(1, 32, 1, desk_profile());
    EXPECT_TRUE(t.trivial);
    EXPECT_EQ(t.d, 0u);
}

TEST(Pipeline, EmptyInput) {
    Params p = derive_params(1, 256, 1, desk_profile());
    DecompBundle b = main_decomp({}, p, repetition_stream(oracle::seed_of(1), 0));
    ASSERT_EQ(b.levels[0].size(), 1u);
    for (unsigned j = 1; j <= p.d; ++j) EXPECT_TRUE(b.levels[j].empty());
    for (const auto& lvl : b.binary) EXPECT_TRUE(lvl.empty());

    EdSketch sk = ed_sketch({}, p, oracle::seed_of(1));
    EdResult r = ed_recover(sk, sk);
    EXPECT_FALSE(r.large);
    EXPECT_EQ(r.distance, 0u);
    EXPECT_TRUE(r.edges.empty());
}

TEST(Pipeline, DecompositionTreeIdentities) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        SymString x = random_symbols(rng, 200 + trial * 10, 26);
        DecompBundle b = main_decomp(x, p, repetition_stream(oracle::seed_of(2), trial));
        uint64_t vis = 0;
        for (unsigned j = 1; j <= p.d; ++j) {
            SymString cat;
            for (const TreeNode& v : b.levels[j]) {
                EXPECT_EQ(v.start, cat.size());
                cat.insert(cat.end(), v.text.begin(), v.text.end());
            }
            EXPECT_EQ(cat, x);
            vis += b.levels[j].size();
        }
        EXPECT_LE(vis, p.d * x.size());
        uint64_t vis_bin = 0;
        for (const auto& lvl : b.binary) vis_bin += lvl.size();
        EXPECT_LE(vis_bin, p.d * p.s * x.size() + 1);
        EXPECT_EQ(b.binary[0].size(), 1u);
        EXPECT_EQ(b.binary[0].begin()->second.len, x.size());

        // Summing left sizes over left ancestors gives each leaf's start.
        const unsigned depth = p.d * p.s;
        for (const TreeNode& v : b.levels[p.d]) {
            uint64_t start = 0;
            for (unsigned lvl = 0; lvl < depth; ++lvl)
                if (v.addr.bit(depth - 1 - lvl)) start += b.binary[lvl].at(v.addr >> (depth - lvl)).left_size;
            EXPECT_EQ(start, v.start);
        }
    }
}

TEST(Pipeline, DeterministicAndRepetitionsDiffer) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(6);
    SymString x = random_symbols(rng, 256, 26);
    auto a = serialize_sketch(ed_sketch(x, p, oracle::seed_of(3)));
    auto b = serialize_sketch(ed_sketch(x, p, oracle::seed_of(3)));
    EXPECT_EQ(a, b);
    EdSketch sk = ed_sketch(x, p, oracle::seed_of(3));
    ASSERT_GE(sk.reps.size(), 2u);
    std::vector<uint8_t> r0, r1;
    hmr_serialize(F(), sk.reps[0].str.back(), Encoding::Sparse, r0);
    hmr_serialize(F(), sk.reps[1].str.back(), Encoding::Sparse, r1);
    EXPECT_NE(r0, r1);
}

TEST(Pipeline, SingleSubstitutionGivesOneDiagonalEdge) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(7);
    SymString x = random_symbols(rng, 256, 26);
    SymString y = x;
    y[100] = (y[100] + 1) % 26;
    EdSketch a = ed_sketch(x, p, oracle::seed_of(4)), b = ed_sketch(y, p, oracle::seed_of(4));
    EdResult r = ed_recover(a, b);
    ASSERT_FALSE(r.large) << r.large_reason;
    ASSERT_EQ(r.edges.size(), 1u);
    EXPECT_EQ(r.edges[0].edge.kind, EdgeKind::D);
    EXPECT_EQ(r.edges[0].edge.i, 100u);
    EXPECT_EQ(r.edges[0].edge.j, 100u);
    EXPECT_EQ(r.edges, costly_annotated(x, y, canonical_alignment(x, y)));
}

TEST(Pipeline, PlantedEditsRecovered) {
    Params p = derive_params(8, 1024, 1.5, desk_profile());
    std::mt19937_64 rng(8);
    int exact = 0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        auto [x, y] = near_pair(rng, 1024, 3, 8);
        Seed seed = oracle::seed_of(static_cast<uint8_t>(10 + t));
        EdResult r = ed_recover(ed_sketch(x, p, seed), ed_sketch(y, p, seed));
        EXPECT_TRUE(r.slice_discipline);
        if (r.large) continue;
        EXPECT_EQ(reconstruct_other(x, r.edges), y);
        if (r.edges == costly_annotated(x, y, canonical_alignment(x, y))) ++exact;
    }
    EXPECT_GE(exact, 9);
}

TEST(Pipeline, FarPairIsLarge) {
    Params p = derive_params(8, 1024, 1.5, desk_profile());
    std::mt19937_64 rng(9);
    for (int t = 0; t < 4; ++t) {
        SymString x = random_symbols(rng, 1000, 26);
        SymString y = apply_random_edits(rng, x, 48, 26);
        y.resize(std::min<std::size_t>(y.size(), 1024));
        ASSERT_GE(edit_distance_dp(x, y), 40u);
        Seed seed = oracle::seed_of(static_cast<uint8_t>(30 + t));
        EXPECT_TRUE(ed_recover(ed_sketch(x, p, seed), ed_sketch(y, p, seed)).large);
    }
}

TEST(Pipeline, SymmetricDistance) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(10);
    for (int t = 0; t < 3; ++t) {
        auto [x, y] = near_pair(rng, 256, 1, 1);
        Seed seed = oracle::seed_of(static_cast<uint8_t>(50 + t));
        EdSketch a = ed_sketch(x, p, seed), b = ed_sketch(y, p, seed);
        EdResult ab = ed_recover(a, b), ba = ed_recover(b, a);
        EXPECT_EQ(ab.large, ba.large);
        EXPECT_EQ(ab.distance, ba.distance);
    }
}

TEST(Pipeline, TrivialGuardUsesDp) {
    Params p = derive_params(2, 64, 1, desk_profile());
    ASSERT_TRUE(p.trivial);
    SymString x = to_symbols("kitten"), y = to_symbols("sitting");
    EdResult r = ed_recover(ed_sketch(x, p, oracle::seed_of(5)), ed_sketch(y, p, oracle::seed_of(5)));
    EXPECT_TRUE(r.large);  // distance 3 > k = 2
    Params q = derive_params(4, 64, 1, desk_profile());
    r = ed_recover(ed_sketch(x, q, oracle::seed_of(5)), ed_sketch(y, q, oracle::seed_of(5)));
    ASSERT_FALSE(r.large);
    EXPECT_EQ(r.distance, 3u);
    EXPECT_EQ(reconstruct_other(x, r.edges), y);
}

TEST(Pipeline, SerializationRoundTripAndErrors) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(11);
    auto [x, y] = near_pair(rng, 256, 1, 1);
    EdSketch a = ed_sketch(x, p, oracle::seed_of(6)), b = ed_sketch(y, p, oracle::seed_of(6));
    auto bytes = serialize_sketch(a);
    EdSketch a2 = deserialize_sketch(bytes);
    EXPECT_EQ(serialize_sketch(a2), bytes);
    EdResult r1 = ed_recover(a, b), r2 = ed_recover(a2, b);
    EXPECT_EQ(r1.large, r2.large);
    EXPECT_EQ(r1.edges, r2.edges);

    std::vector<uint8_t> cut(bytes.begin(), bytes.end() - 1);
    EXPECT_THROW(deserialize_sketch(cut), FormatError);
    std::vector<uint8_t> extra = bytes;
    extra.push_back(0);
    EXPECT_THROW(deserialize_sketch(extra), FormatError);
    std::vector<uint8_t> magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(deserialize_sketch(magic), FormatError);

    EXPECT_THROW(ed_recover(a, ed_sketch(y, p, oracle::seed_of(7))), IncompatibleSketch);
    Params other_n = derive_params(1, 512, 1, desk_profile());
    EXPECT_THROW(ed_recover(a, ed_sketch(y, other_n, oracle::seed_of(6))), IncompatibleSketch);
}

TEST(Pipeline, DenseSizeMatchesClosedForm) {
    Params p = derive_params(1, 64, 1, tiny_profile());
    ASSERT_FALSE(p.trivial);
    EXPECT_EQ(p.kappa_bits[0], 9u);
    std::mt19937_64 rng(12);
    SymString x = random_symbols(rng, 64, 26);
    EdSketch sk = ed_sketch(x, p, oracle::seed_of(8));
    auto dense = serialize_sketch(sk, Encoding::Dense);
    EXPECT_EQ(dense.size(), dense_sketch_size(p));
    EXPECT_LT(serialize_sketch(sk).size(), dense.size());
    EXPECT_EQ(serialize_sketch(deserialize_sketch(dense)), serialize_sketch(sk));
}

TEST(Pipeline, MissingAncestorSizeDropsNode) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(13);
    SymString x = random_symbols(rng, 256, 26);
    EdSketch sk = ed_sketch(x, p, oracle::seed_of(9));
    // Identical sketches recover no sizes, so only the leftmost node (empty
    // sum) keeps a start.
    FoundStrings strs;
    strs.nodes[{1, U256(0)}] = {x, x};
    strs.nodes[{1, U256(1)}] = {x, x};
    FoundStarts st = find_locations(sk.reps[0].loc, sk.reps[0].loc, strs, p);
    ASSERT_EQ(st.nodes.size(), 1u);
    EXPECT_EQ(st.nodes.begin()->first.second, U256(0));
    EXPECT_EQ(st.nodes.begin()->second, std::make_pair(uint64_t{0}, uint64_t{0}));

    // Nested nodes: only the prefix-minimal one contributes edges.
    EXPECT_TRUE(main_reconstruct(sk.reps[0], sk.reps[0], p).empty());
}

TEST(Pipeline, CorruptedRuleDecodesUndefined) {
    Params p = derive_params(1, 256, 1, desk_profile());
    std::mt19937_64 rng(14);
    SymString x = random_symbols(rng, 256, 26);
    DecompBundle b = main_decomp(x, p, repetition_stream(oracle::seed_of(10), 0));
    const TreeNode& v = b.levels[p.d].front();
    ASSERT_EQ(basic_decode(v.grammar, p.n), v.text);
    // A flipped bit in a rule name leaves a dangling reference.
    Grammar g = v.grammar;
    ASSERT_GE(g.rules.size(), 2u);
    g.rules.front() ^= RuleId{1} << 81;
    std::sort(g.rules.begin(), g.rules.end());
    EXPECT_FALSE(basic_decode(g, p.n).has_value());
    // Dropping any one rule (a proper subset) is undefined as well.
    for (std::size_t i = 0; i < v.grammar.rules.size(); ++i) {
        Grammar h = v.grammar;
        h.rules.erase(h.rules.begin() + static_cast<std::ptrdiff_t>(i));
        EXPECT_FALSE(basic_decode(h, p.n).has_value());
    }
}
