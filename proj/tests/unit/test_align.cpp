#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "edsketch/align.hpp"
#include "edsketch/errors.hpp"

using namespace edsketch;

namespace {
SymString S(const char* s) { return to_symbols(s); }
}  // namespace

TEST(EditDistance, Examples) {
    EXPECT_EQ(edit_distance_dp(S(""), S("abc")), 3u);
    EXPECT_EQ(edit_distance_dp(S("abc"), S("abc")), 0u);
    EXPECT_EQ(edit_distance_dp(S("kitten"), S("sitting")), 3u);
    EXPECT_EQ(edit_distance_dp(S("sitting"), S("kitten")), 3u);
}

TEST(CanonicalAlignment, SingleMatch) {
    auto a = canonical_alignment(S("a"), S("a"));
    ASSERT_EQ(a.edges.size(), 1u);
    EXPECT_EQ(a.edges[0].kind, EdgeKind::D);
    EXPECT_EQ(alignment_cost(S("a"), S("a"), a), 0u);
}

TEST(CanonicalAlignment, PreferenceFixesUniquePath) {
    auto x = S("ab"), y = S("b");
    auto a = canonical_alignment(x, y);
    EXPECT_EQ(oracle::kinds_of(a), oracle::lex_max_path(oracle::all_optimal_paths(x, y)));
    EXPECT_EQ(oracle::kinds_of(a), (std::vector<EdgeKind>{EdgeKind::H, EdgeKind::D}));
}

TEST(CanonicalAlignment, LexMaxSmallExhaustive) {
    auto strs = oracle::all_binary_strings(4);
    for (const auto& x : strs)
        for (const auto& y : strs) {
            auto a = canonical_alignment(x, y);
            ASSERT_EQ(alignment_cost(x, y, a), edit_distance_dp(x, y));
            ASSERT_EQ(oracle::kinds_of(a), oracle::lex_max_path(oracle::all_optimal_paths(x, y)));
        }
}

TEST(CanonicalAlignment, CostMatchesDpOnRandomPairs) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 500; ++t) {
        auto x = oracle::random_string(rng, rng() % 60, 4);
        auto y = oracle::plant_edits(rng, x, static_cast<unsigned>(rng() % 10), 4);
        auto a = canonical_alignment(x, y);
        EXPECT_EQ(alignment_cost(x, y, a), edit_distance_dp(x, y));
        EXPECT_EQ(a.end(), (Point{x.size(), y.size()}));
    }
}

TEST(Costly, Examples) {
    auto x = S("abc");
    EXPECT_TRUE(costly_annotated(x, x, canonical_alignment(x, x)).empty());
    auto y = S("adc");
    auto c = costly_annotated(x, y, canonical_alignment(x, y));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].edge, (GridEdge{1, 1, EdgeKind::D}));
    EXPECT_EQ(c[0].x_sym, U'b');
    EXPECT_EQ(c[0].y_sym, U'd');
    EXPECT_EQ(edge_to_text(c[0]), "D 1 1 98 100");
}

TEST(Reconstruct, Examples) {
    auto x = S("abc");
    EXPECT_EQ(reconstruct_other(x, {}), x);
    EdgeSet c{{{1, 1, EdgeKind::D}, U'b', U'd'}};
    EXPECT_EQ(reconstruct_other(x, c), S("adc"));
}

TEST(Reconstruct, RoundTripBothDirections) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 300; ++t) {
        auto x = oracle::random_string(rng, rng() % 100, 3);
        auto y = oracle::plant_edits(rng, x, static_cast<unsigned>(rng() % 12), 3);
        auto c = costly_annotated(x, y, canonical_alignment(x, y));
        EXPECT_EQ(c.size(), edit_distance_dp(x, y));
        EXPECT_EQ(reconstruct_other(x, c), y);
        EXPECT_EQ(reconstruct_other(y, mirror(c)), x);
        EXPECT_TRUE(slice_discipline_ok(c));
    }
}

TEST(Reconstruct, Malformed) {
    auto x = S("abc");
    // Annotation disagrees with x.
    EXPECT_THROW(reconstruct_other(x, {{{1, 1, EdgeKind::D}, U'z', U'd'}}), MalformedEdgeSet);
    // Gap that is not a diagonal run.
    EXPECT_THROW(reconstruct_other(x, {{{2, 0, EdgeKind::V}, kEps, U'q'}}), MalformedEdgeSet);
    // Edge beyond x.
    EXPECT_THROW(reconstruct_other(x, {{{5, 5, EdgeKind::H}, U'a', kEps}}), MalformedEdgeSet);
}

TEST(Restrict, FullBoxAndUnitBoxes) {
    auto x = S("abcab"), y = S("acbb");
    auto a = canonical_alignment(x, y);
    auto full = restrict_alignment(a, {0, x.size()}, {0, y.size()});
    ASSERT_TRUE(full.has_value());
    EXPECT_EQ(*full, a);
    for (const auto& e : a.edges) {
        auto t = e.tail(), h = e.head();
        auto r = restrict_alignment(a, {t.i, h.i}, {t.j, h.j});
        ASSERT_TRUE(r.has_value());
        ASSERT_EQ(r->edges.size(), 1u);
        EXPECT_EQ(r->edges[0], e);
    }
    // A corner that is not on the path.
    Point off{0, y.size()};
    bool on = false;
    Point cur = a.start;
    for (const auto& e : a.edges) on |= cur == off, cur = e.head();
    if (!on) EXPECT_FALSE(restrict_alignment(a, {0, x.size()}, {y.size(), y.size()}).has_value());
}

TEST(Restrict, SubPathIsCanonicalOfSubstrings) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        auto x = oracle::random_string(rng, 1 + rng() % 30, 3);
        auto y = oracle::plant_edits(rng, x, 1 + static_cast<unsigned>(rng() % 6), 3);
        auto a = canonical_alignment(x, y);
        Point cur = a.start;
        std::vector<Point> pts{cur};
        for (const auto& e : a.edges) pts.push_back(cur = e.head());
        for (const auto& p : pts) {
            for (const auto& q : {Point{x.size(), y.size()}, pts[pts.size() / 2]}) {
                if (q.i < p.i || q.j < p.j) continue;
                auto r = restrict_alignment(a, {p.i, q.i}, {p.j, q.j});
                ASSERT_TRUE(r.has_value());
                auto sub = canonical_alignment(x.substr(p.i, q.i - p.i), y.substr(p.j, q.j - p.j));
                ASSERT_EQ(r->edges.size(), sub.edges.size());
                for (std::size_t k = 0; k < sub.edges.size(); ++k) {
                    auto e = sub.edges[k];
                    e.i += p.i, e.j += p.j;
                    EXPECT_EQ(r->edges[k], e);
                }
            }
        }
    }
}

TEST(Slice, OneEdgePerSliceOnSpanningPaths) {
    auto x = S("kitten"), y = S("sitting");
    auto a = canonical_alignment(x, y);
    EdgeSet all;
    for (const auto& e : a.edges) all.push_back({e, kEps, kEps});
    EdgeSet uni;
    for (uint64_t i = 1; i <= x.size(); ++i) {
        auto s = slice(all, SliceKind::V, i);
        EXPECT_EQ(s.size(), 1u);
        uni.insert(uni.end(), s.begin(), s.end());
    }
    for (uint64_t j = 1; j <= y.size(); ++j) {
        auto s = slice(all, SliceKind::H, j);
        EXPECT_EQ(s.size(), 1u);
        uni.insert(uni.end(), s.begin(), s.end());
    }
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    EXPECT_EQ(uni, all);
    EXPECT_TRUE(slice({}, SliceKind::V, 1).empty());
}

TEST(Align, EmptyBoxHasEmptyPath) {
    auto a = canonical_alignment(S(""), S(""));
    EXPECT_TRUE(a.edges.empty());
    EXPECT_EQ(a.end(), (Point{0, 0}));
}
