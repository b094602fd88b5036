#include <gtest/gtest.h>

#include <random>
#include <set>

#include "../support/seeds.hpp"
#include "edsketch/errors.hpp"
#include "edsketch/mrs.hpp"

using namespace edsketch;

TEST(Trace, SmallPrimeExamples) {
    PrimeField f(U256(101));
    TraceVector t = trace(f, U256(3), f.from_u64(5), f.from_u64(10));
    EXPECT_EQ(f.to_u256(t.value), U256(5));
    EXPECT_EQ(f.to_u256(t.product), U256(15));
    EXPECT_EQ(f.to_u256(t.square), U256(25));
    EXPECT_EQ(f.to_u256(t.hash), U256(51));
    EXPECT_TRUE(tv_is_zero(f, trace(f, U256(9), f.zero(), f.from_u64(10))));
    TraceVector z = trace(f, U256(0), f.from_u64(7), f.from_u64(10));
    EXPECT_EQ(f.to_u256(z.product), U256(0));
    EXPECT_EQ(f.to_u256(z.square), U256(49));
    EXPECT_EQ(f.to_u256(z.hash), U256(7));
}

TEST(Restore, SmallPrimeExample) {
    PrimeField f(U256(101));
    TraceVector d{f.from_u64(3), f.from_u64(9), f.from_u64(21), f.zero()};
    MismatchTriple m = restore(f, d);
    EXPECT_EQ(m.index, U256(3));
    EXPECT_EQ(f.to_u256(m.x_val), U256(5));
    EXPECT_EQ(f.to_u256(m.y_val), U256(2));
    EXPECT_THROW(restore(f, TraceVector{}), ZeroValue);
}

TEST(Restore, OppositeValues) {
    const auto& f = PrimeField::default_field();
    FieldElem u = f.from_u64(12345), a = f.from_u64(77);
    TraceVector d = tv_sub(f, trace(f, U256(42), u, a), trace(f, U256(42), f.neg(u), a));
    EXPECT_TRUE(f.is_zero(d.square));
    MismatchTriple m = restore(f, d);
    EXPECT_EQ(m.x_val, u);
    EXPECT_EQ(m.y_val, f.neg(u));
}

TEST(Restore, RandomSingleMismatches) {
    for (const PrimeField& f : {PrimeField(U256(101)), PrimeField::default_field()}) {
        Stream s(oracle::seed_of(30), {{Tag::Purpose, 99}});
        for (int t = 0; t < 10000; ++t) {
            U256 i = f.modulus() == U256(101) ? U256(s.below(101)) : U256(s.next_u64());
            FieldElem u = s.field_elem(f), w = s.field_elem(f), a = s.nonzero_field_elem(f);
            if (u == w) continue;
            MismatchTriple m = restore(f, tv_sub(f, trace(f, i, u, a), trace(f, i, w, a)));
            ASSERT_EQ(m.index, i);
            ASSERT_EQ(m.x_val, u);
            ASSERT_EQ(m.y_val, w);
        }
    }
}

TEST(SuperSketch, ZeroSingleAndLinearity) {
    const auto& f = PrimeField::default_field();
    Stream s(oracle::seed_of(31), {{Tag::Purpose, 99}});
    FieldElem a = s.nonzero_field_elem(f);
    PairwiseHash h = PairwiseHash::draw(s, 10, 4);
    SuperSketch z = super_sketch(f, {}, U256(1024), a, h);
    for (const auto& b : z.buckets) EXPECT_TRUE(tv_is_zero(f, b));
    SuperSketch one = super_sketch(f, {{U256(700), f.from_u64(9)}}, U256(1024), a, h);
    for (std::size_t b = 0; b < one.buckets.size(); ++b) {
        if (b == h.eval(U256(700))) EXPECT_EQ(one.buckets[b], trace(f, U256(700), f.from_u64(9), a));
        else EXPECT_TRUE(tv_is_zero(f, one.buckets[b]));
    }
    SparseSeq u, w, diff;
    for (uint64_t i = 0; i < 1024; i += 3) {
        FieldElem ui = s.field_elem(f), wi = s.field_elem(f);
        u.push_back({U256(i), ui});
        w.push_back({U256(i), wi});
        diff.push_back({U256(i), f.sub(ui, wi)});
    }
    SuperSketch su = super_sketch(f, u, U256(1024), a, h), sw = super_sketch(f, w, U256(1024), a, h),
                sd = super_sketch(f, diff, U256(1024), a, h);
    // The value, product and hash components are linear; the square component is not.
    for (std::size_t b = 0; b < su.buckets.size(); ++b) {
        TraceVector d = tv_sub(f, su.buckets[b], sw.buckets[b]);
        EXPECT_EQ(d.value, sd.buckets[b].value);
        EXPECT_EQ(d.product, sd.buckets[b].product);
        EXPECT_EQ(d.hash, sd.buckets[b].hash);
    }
    EXPECT_THROW(super_sketch(f, {{U256(1024), f.one()}}, U256(1024), a, h), IndexOverflow);
}

TEST(SuperSketch, SingleMismatchExhaustive) {
    const auto& f = PrimeField::default_field();
    Stream s(oracle::seed_of(32), {{Tag::Purpose, 99}});
    FieldElem a = s.nonzero_field_elem(f);
    PairwiseHash h = PairwiseHash::draw(s, 6, 3);
    SparseSeq base;
    for (uint64_t i = 0; i < 64; ++i) base.push_back({U256(i), f.from_u64(i * 7 + 1)});
    SuperSketch sb = super_sketch(f, base, U256(64), a, h);
    EXPECT_TRUE(super_recover(f, sb, sb).empty());
    for (uint64_t i = 0; i < 64; ++i) {
        SparseSeq other = base;
        other[i].second = f.from_u64(1000 + i);
        auto out = super_recover(f, sb, super_sketch(f, other, U256(64), a, h));
        ASSERT_EQ(out.size(), 1u);
        EXPECT_EQ(out[0].index, U256(i));
        EXPECT_EQ(out[0].x_val, base[i].second);
        EXPECT_EQ(out[0].y_val, other[i].second);
    }
}

TEST(SuperSketch, CollidingPairIsFiltered) {
    const auto& f = PrimeField::default_field();
    Stream s(oracle::seed_of(33), {{Tag::Purpose, 99}});
    PairwiseHash h = PairwiseHash::draw(s, 6, 0);  // one bucket: every pair collides
    int fired = 0;
    for (int t = 0; t < 10000; ++t) {
        FieldElem a = s.nonzero_field_elem(f);
        SparseSeq u{{U256(3), f.from_u64(5)}, {U256(17), f.from_u64(9)}};
        auto out = super_recover(f, super_sketch(f, u, U256(64), a, h), super_sketch(f, {}, U256(64), a, h));
        fired += !out.empty();
    }
    EXPECT_EQ(fired, 0);
}

TEST(SuperSketch, SerializationRoundTripAndMismatch) {
    const auto& f = PrimeField::default_field();
    Stream s(oracle::seed_of(34), {{Tag::Purpose, 99}});
    FieldElem a = s.nonzero_field_elem(f);
    PairwiseHash h = PairwiseHash::draw(s, 12, 5);
    SuperSketch sk = super_sketch(f, {{U256(5), f.from_u64(3)}, {U256(4000), f.from_u64(8)}}, U256(4096), a, h);
    auto bytes = serialize(f, sk);
    EXPECT_EQ(bytes.size(), 32 + 8 + 32 + 5 * 16 + 3 + 32 * 4 * 32);
    SuperSketch back = deserialize_super_sketch(f, bytes);
    EXPECT_EQ(back.buckets, sk.buckets);
    EXPECT_TRUE(super_recover(f, sk, back).empty());
    SuperSketch other = sk;
    other.alpha = f.add(other.alpha, f.one());
    EXPECT_THROW(super_recover(f, sk, other), SketchMismatch);
    bytes.pop_back();
    EXPECT_THROW(deserialize_super_sketch(f, bytes), FormatError);
}

TEST(Rmrs, SingleSlotEqualsSuperRecover) {
    const auto& f = PrimeField::default_field();
    Stream s(oracle::seed_of(35), {{Tag::Purpose, 99}});
    SparseSeq u{{U256(1), f.from_u64(3)}, {U256(2), f.from_u64(4)}}, w{{U256(2), f.from_u64(5)}};
    RmrsSketch a = rmrs_sketch(f, u, U256(256), 4, 1, s), b = rmrs_sketch(f, w, U256(256), 4, 1, s);
    EXPECT_EQ(rmrs_recover(f, a, b), super_recover(f, a.slots[0], b.slots[0]));
}

TEST(Rmrs, StrictMajorityBoundary) {
    MismatchTriple m{U256(1), {}, {}};
    std::vector<std::vector<MismatchTriple>> per{{m}, {m}, {}, {}};
    EXPECT_TRUE(majority_vote(per).empty());
    per[2].push_back(m);
    EXPECT_EQ(majority_vote(per).size(), 1u);
}

TEST(Rmrs, SimpleHammingRecovery) {
    const auto& f = PrimeField::default_field();
    const uint64_t D = 4096, K = 32;
    const uint64_t ell = redundancy(std::log(static_cast<double>(D)), 1e-3, 8.0);
    std::mt19937_64 rng(36);
    int full = 0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        SparseSeq u, w;
        std::set<uint64_t> mism;
        while (mism.size() < K) mism.insert(rng() % D);
        std::set<MismatchTriple> truth;
        for (uint64_t i = 0; i < D; ++i) {
            uint64_t c = 1 + rng() % 26;
            uint64_t d = mism.count(i) ? 1 + (c + rng() % 25) % 26 : c;
            u.push_back({U256(i), f.from_u64(c)});
            w.push_back({U256(i), f.from_u64(d)});
            if (c != d) truth.insert({U256(i), f.from_u64(c), f.from_u64(d)});
        }
        Stream s(oracle::seed_of(37), {{Tag::Repetition, static_cast<uint64_t>(t)}});
        auto out = rmrs_recover(f, rmrs_sketch(f, u, U256(D), 7, ell, s), rmrs_sketch(f, w, U256(D), 7, ell, s));
        full += std::set<MismatchTriple>(out.begin(), out.end()) == truth;
    }
    EXPECT_EQ(full, trials);
}
