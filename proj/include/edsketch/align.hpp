#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edsketch {

using Symbol = char32_t;
using SymString = std::u32string;

// Marker for the missing side of an insertion/deletion annotation.
inline constexpr Symbol kEps = 0xFFFFFFFFu;

SymString to_symbols(const std::string& bytes);

// Grid edges are identified by their tail point (i, j), 0 ≤ i ≤ |x|, 0 ≤ j ≤ |y|.
// Horizontal (i,j)→(i+1,j) deletes x_{i+1}; vertical (i,j)→(i,j+1) inserts
// y_{j+1}; diagonal (i,j)→(i+1,j+1) matches or substitutes (1-based symbols).
enum class EdgeKind : uint8_t { H = 0, V = 1, D = 2 };

struct Point {
    uint64_t i = 0, j = 0;
    friend auto operator<=>(const Point&, const Point&) = default;
};

struct GridEdge {
    uint64_t i = 0, j = 0;
    EdgeKind kind = EdgeKind::D;

    Point tail() const { return {i, j}; }
    Point head() const {
        return {i + (kind != EdgeKind::V ? 1u : 0u), j + (kind != EdgeKind::H ? 1u : 0u)};
    }
    friend auto operator<=>(const GridEdge&, const GridEdge&) = default;
};

struct AnnotatedEdge {
    GridEdge edge;
    Symbol x_sym = kEps;
    Symbol y_sym = kEps;
    friend auto operator<=>(const AnnotatedEdge&, const AnnotatedEdge&) = default;
};

using EdgeSet = std::vector<AnnotatedEdge>;  // kept sorted by (i, j)

// A spanning path of a box; `start` is the lower-left corner (needed for the
// empty path of a degenerate box).
struct Alignment {
    Point start;
    std::vector<GridEdge> edges;

    Point end() const { return edges.empty() ? start : edges.back().head(); }
    friend bool operator==(const Alignment&, const Alignment&) = default;
};

// Half-open integer interval (lo, hi], matching the (0, n] position convention.
struct Interval {
    uint64_t lo = 0, hi = 0;
    uint64_t size() const { return hi - lo; }
};

uint64_t edit_distance_dp(const SymString& x, const SymString& y);

// Optimal spanning path of Grid_{|x|×|y|} that is lexicographically maximum
// under vertical > diagonal > horizontal.
Alignment canonical_alignment(const SymString& x, const SymString& y);

uint64_t alignment_cost(const SymString& x, const SymString& y, const Alignment& a);

EdgeSet costly_annotated(const SymString& x, const SymString& y, const Alignment& a);

// Recovers y from x and the costly part of an alignment of x and y.
// Throws MalformedEdgeSet when the edges do not describe such an alignment.
SymString reconstruct_other(const SymString& x, const EdgeSet& costly);

// Sub-path of `a` between the corners of the box I×J, or nullopt when the
// path misses a corner.
std::optional<Alignment> restrict_alignment(const Alignment& a, Interval I, Interval J);

enum class SliceKind { V, H };

// V: edges advancing the first coordinate from index−1 to index.
// H: edges advancing the second coordinate from index−1 to index.
EdgeSet slice(const EdgeSet& edges, SliceKind kind, uint64_t index);

// True iff no vertical or horizontal slice holds more than one edge.
bool slice_discipline_ok(const EdgeSet& edges);

// The same edge set seen from the other string: swaps coordinates, H↔V and
// the two annotation sides.
EdgeSet mirror(const EdgeSet& edges);

// Shifts every edge tail by (di, dj).
EdgeSet shifted(const EdgeSet& edges, uint64_t di, uint64_t dj);

// Text form: "V i j", "H i j" or "D i j x_sym y_sym" (symbols as integers).
std::string edge_to_text(const AnnotatedEdge& e);
std::string edges_to_text(const EdgeSet& edges);

}  // namespace edsketch
