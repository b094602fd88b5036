#include <gtest/gtest.h>

#include <cmath>

#include "edsketch/errors.hpp"
#include "edsketch/field.hpp"
#include "edsketch/hashing.hpp"
#include "edsketch/randomness.hpp"

using namespace edsketch;

namespace {

Seed test_seed(uint8_t v) {
    Seed s{};
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<uint8_t>(v + i);
    return s;
}

}  // namespace

TEST(Field, InverseSmallPrimes) {
    PrimeField f7(U256(7));
    EXPECT_EQ(f7.to_u256(fe_inv(f7, f7.from_u64(2))), U256(4));
    PrimeField f101(U256(101));
    EXPECT_EQ(f101.to_u256(fe_inv(f101, f101.one())), U256(1));
    EXPECT_THROW(fe_inv(f7, f7.zero()), ZeroInverse);
}

TEST(Field, PowSmallPrimes) {
    PrimeField f101(U256(101));
    EXPECT_EQ(f101.to_u256(fe_pow(f101, f101.from_u64(10), U256(3))), U256(91));
    PrimeField f7(U256(7));
    EXPECT_EQ(f7.to_u256(fe_pow(f7, f7.from_u64(3), U256(6))), U256(1));
    for (uint64_t a = 0; a < 7; ++a) EXPECT_EQ(f7.to_u256(fe_pow(f7, f7.from_u64(a), U256(0))), U256(1));
}

TEST(Field, AxiomsExhaustiveP7) {
    PrimeField f(U256(7));
    for (uint64_t a = 0; a < 7; ++a)
        for (uint64_t b = 0; b < 7; ++b)
            for (uint64_t c = 0; c < 7; ++c) {
                auto A = f.from_u64(a), B = f.from_u64(b), C = f.from_u64(c);
                EXPECT_EQ(f.add(f.add(A, B), C), f.add(A, f.add(B, C)));
                EXPECT_EQ(f.mul(A, f.add(B, C)), f.add(f.mul(A, B), f.mul(A, C)));
                EXPECT_EQ(f.to_u256(f.mul(A, B)), U256((a * b) % 7));
                EXPECT_EQ(f.to_u256(f.sub(A, B)), U256((a + 7 - b) % 7));
            }
    for (uint64_t a = 1; a < 7; ++a) EXPECT_EQ(f.mul(f.from_u64(a), f.inv(f.from_u64(a))), f.one());
}

TEST(Field, AxiomsRandomDefaultPrime) {
    const auto& f = PrimeField::default_field();
    Stream s(test_seed(1), {{Tag::Purpose, 99}});
    for (int t = 0; t < 500; ++t) {
        auto a = s.nonzero_field_elem(f), b = s.field_elem(f), c = s.field_elem(f);
        EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
        EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
    }
}

TEST(Field, PowMatchesIteratedMultiplication) {
    for (uint64_t p : {7ULL, 101ULL}) {
        PrimeField f{U256(p)};
        for (uint64_t a = 0; a < p; a += (p > 10 ? 7 : 1)) {
            FieldElem acc = f.one();
            for (uint64_t e = 0; e <= 64; ++e) {
                EXPECT_EQ(fe_pow(f, f.from_u64(a), U256(e)), acc);
                acc = f.mul(acc, f.from_u64(a));
            }
        }
    }
    const auto& f = PrimeField::default_field();
    FieldElem base = f.from_u64(123456789);
    FieldElem acc = f.one();
    for (uint64_t e = 0; e <= 64; ++e) {
        EXPECT_EQ(fe_pow(f, base, U256(e)), acc);
        acc = f.mul(acc, base);
    }
}

TEST(Field, FixedBasePowAgreesWithPow) {
    const auto& f = PrimeField::default_field();
    Stream s(test_seed(2), {{Tag::Purpose, 99}});
    FieldElem base = s.nonzero_field_elem(f);
    FixedBasePow fb(f, base, 220);
    for (int t = 0; t < 200; ++t) {
        U256 e = s.next_u256() >> 36;
        EXPECT_EQ(fb.pow(e), f.pow(base, e));
    }
    U256 wide = s.next_u256();
    EXPECT_EQ(fb.pow(wide), f.pow(base, wide));
}

TEST(Field, SerializationRoundTrip) {
    const auto& f = PrimeField::default_field();
    EXPECT_EQ(f.byte_width(), 32u);
    Stream s(test_seed(3), {});
    for (int t = 0; t < 50; ++t) {
        auto a = s.field_elem(f);
        std::vector<uint8_t> buf;
        f.serialize(a, buf);
        EXPECT_EQ(f.deserialize(buf.data()), a);
    }
    std::vector<uint8_t> big(32, 0xFF);
    big[31] = 0x7F;
    EXPECT_THROW(f.deserialize(big.data()), FormatError);
    PrimeField f101(U256(101));
    EXPECT_EQ(f101.byte_width(), 1u);
}

TEST(Field, ReductionOfWideIntegers) {
    PrimeField f101(U256(101));
    U256 x = ~U256();
    // (2^256 − 1) mod 101 via small division.
    U256 q = x;
    uint64_t r = U256::divmod_small(q, 101);
    EXPECT_EQ(f101.to_u256(f101.from_u256(x)), U256(r));
}

TEST(Hashing, RangeZeroAlwaysZero) {
    Stream s(test_seed(4), {});
    auto h = PairwiseHash::draw(s, 32, 0);
    for (uint64_t x = 0; x < 100; ++x) EXPECT_EQ(pairwise_eval(h, x), 0u);
}

TEST(Hashing, Deterministic) {
    Stream s(test_seed(5), {});
    auto h = PairwiseHash::draw(s, 64, 10);
    EXPECT_EQ(pairwise_eval(h, 12345), pairwise_eval(h, 12345));
    EXPECT_LT(pairwise_eval(h, 12345), 1024u);
}

TEST(Hashing, DomainOverflow) {
    Stream s(test_seed(6), {});
    auto h = PairwiseHash::draw(s, 8, 4);
    EXPECT_NO_THROW(pairwise_eval(h, 255));
    EXPECT_THROW(pairwise_eval(h, 256), DomainOverflow);
}

TEST(Hashing, PairCollisionRateMonteCarlo) {
    // Over 1e5 independent seeds, Pr[h(x) = h(x')] ≈ 2^-r within 3σ.
    const unsigned r = 6;
    const int trials = 100000;
    const double pr = 1.0 / (1u << r);
    Stream s(test_seed(7), {});
    for (auto [x, y] : {std::pair<uint64_t, uint64_t>{1, 2}, {0, 1ULL << 40}, {12345, 54321}}) {
        int coll = 0;
        for (int t = 0; t < trials; ++t) {
            auto h = PairwiseHash::draw(s, 64, r);
            coll += h.eval(x) == h.eval(y);
        }
        double sigma = std::sqrt(trials * pr * (1 - pr));
        EXPECT_NEAR(coll, trials * pr, 3 * sigma) << x << " vs " << y;
    }
}

TEST(Hashing, WideKeysMatchNarrowEvaluation) {
    Stream s(test_seed(8), {});
    auto h = PairwiseHash::draw(s, 200, 20);
    for (uint64_t x = 0; x < 1000; x += 37) EXPECT_EQ(h.eval(U256(x)), h.eval(x));
    EXPECT_THROW(pairwise_eval(h, U256(1) << 200), DomainOverflow);
}

TEST(Randomness, SamePathSameStream) {
    Stream a(test_seed(9), {{Tag::Level, 1}, {Tag::RedundancySlot, 3}});
    Stream b(test_seed(9), {{Tag::Level, 1}, {Tag::RedundancySlot, 3}});
    std::vector<uint8_t> x(1000), y(1000);
    a.bytes(x.data(), x.size());
    b.bytes(y.data(), y.size());
    EXPECT_EQ(x, y);
}

TEST(Randomness, DistinctPathsDiffer) {
    Stream a(test_seed(9), {{Tag::Level, 1}});
    Stream b(test_seed(9), {{Tag::Level, 2}});
    std::array<uint8_t, 32> x{}, y{};
    a.bytes(x.data(), 32);
    b.bytes(y.data(), 32);
    EXPECT_NE(x, y);
    // Prefix-freeness: a path and its extension never share an encoding.
    EXPECT_NE(encode_path({{Tag::Level, 1}}), encode_path({{Tag::Level, 1}, {Tag::Level, 0}}));
}

TEST(Randomness, SharedSeedGivesSharedHashSeeds) {
    // Two independent parties deriving slot hashes from the same public seed.
    auto party = [](const Seed& seed) {
        std::vector<PairwiseHash> hs;
        for (uint64_t slot = 0; slot < 8; ++slot) {
            Stream s(seed, {{Tag::Repetition, 0}, {Tag::Level, 2}, {Tag::RedundancySlot, slot}});
            hs.push_back(PairwiseHash::draw(s, 64, 12));
        }
        return hs;
    };
    auto hx = party(test_seed(10)), hy = party(test_seed(10));
    for (std::size_t i = 0; i < hx.size(); ++i) {
        EXPECT_TRUE(hx[i].a == hy[i].a);
        EXPECT_TRUE(hx[i].b == hy[i].b);
    }
}

TEST(Randomness, SeedHexRoundTrip) {
    Seed s = test_seed(11);
    EXPECT_EQ(seed_from_hex(seed_to_hex(s)), s);
    EXPECT_THROW(seed_from_hex("abc"), FormatError);
}

TEST(Randomness, BelowIsInRange) {
    Stream s(test_seed(12), {});
    for (int i = 0; i < 1000; ++i) EXPECT_LT(s.below(7), 7u);
}
