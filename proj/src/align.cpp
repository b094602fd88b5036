#include "edsketch/align.hpp"

#include <algorithm>

#include "edsketch/errors.hpp"

namespace edsketch {

SymString to_symbols(const std::string& bytes) {
    SymString s;
    s.reserve(bytes.size());
    for (unsigned char c : bytes) s.push_back(c);
    return s;
}

uint64_t edit_distance_dp(const SymString& x, const SymString& y) {
    const std::size_t m = y.size();
    std::vector<uint64_t> row(m + 1), next(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        next[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            uint64_t sub = row[j - 1] + (x[i - 1] != y[j - 1] ? 1 : 0);
            next[j] = std::min({row[j] + 1, next[j - 1] + 1, sub});
        }
        std::swap(row, next);
    }
    return row[m];
}

Alignment canonical_alignment(const SymString& x, const SymString& y) {
    const std::size_t n = x.size(), m = y.size();
    const std::size_t w = m + 1;
    // dist[i*w + j] = ED(x[i..], y[j..]), the distance from (i, j) to the sink.
    std::vector<uint32_t> dist((n + 1) * w);
    for (std::size_t i = n + 1; i-- > 0;) {
        for (std::size_t j = m + 1; j-- > 0;) {
            uint32_t best;
            if (i == n) best = static_cast<uint32_t>(m - j);
            else if (j == m) best = static_cast<uint32_t>(n - i);
            else {
                best = dist[(i + 1) * w + j + 1] + (x[i] != y[j] ? 1 : 0);
                best = std::min(best, dist[(i + 1) * w + j] + 1);
                best = std::min(best, dist[i * w + j + 1] + 1);
            }
            dist[i * w + j] = best;
        }
    }

    Alignment a;
    a.edges.reserve(n + m);
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        uint32_t here = dist[i * w + j];
        if (j < m && dist[i * w + j + 1] + 1 == here) {
            a.edges.push_back({i, j, EdgeKind::V});
            ++j;
        } else if (i < n && j < m && dist[(i + 1) * w + j + 1] + (x[i] != y[j] ? 1u : 0u) == here) {
            a.edges.push_back({i, j, EdgeKind::D});
            ++i, ++j;
        } else {
            a.edges.push_back({i, j, EdgeKind::H});
            ++i;
        }
    }
    return a;
}

uint64_t alignment_cost(const SymString& x, const SymString& y, const Alignment& a) {
    uint64_t cost = 0;
    for (const auto& e : a.edges) {
        if (e.kind != EdgeKind::D || x[e.i] != y[e.j]) ++cost;
    }
    return cost;
}

EdgeSet costly_annotated(const SymString& x, const SymString& y, const Alignment& a) {
    EdgeSet out;
    for (const auto& e : a.edges) {
        switch (e.kind) {
            case EdgeKind::H: out.push_back({e, x[e.i], kEps}); break;
            case EdgeKind::V: out.push_back({e, kEps, y[e.j]}); break;
            case EdgeKind::D:
                if (x[e.i] != y[e.j]) out.push_back({e, x[e.i], y[e.j]});
                break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

SymString reconstruct_other(const SymString& x, const EdgeSet& costly) {
    EdgeSet edges = costly;
    std::sort(edges.begin(), edges.end());
    SymString y;
    Point cur{0, 0};
    for (const auto& ae : edges) {
        const GridEdge& e = ae.edge;
        if (e.i < cur.i || e.j < cur.j || e.i - cur.i != e.j - cur.j)
            throw MalformedEdgeSet("gap before edge " + edge_to_text(ae) + " is not a diagonal run");
        if (e.i > x.size()) throw MalformedEdgeSet("edge " + edge_to_text(ae) + " lies outside x");
        y.append(x, cur.i, e.i - cur.i);
        switch (e.kind) {
            case EdgeKind::H:
                if (e.i >= x.size() || ae.x_sym != x[e.i] || ae.y_sym != kEps)
                    throw MalformedEdgeSet("deletion annotation inconsistent with x: " + edge_to_text(ae));
                break;
            case EdgeKind::V:
                if (ae.x_sym != kEps || ae.y_sym == kEps)
                    throw MalformedEdgeSet("insertion annotation malformed: " + edge_to_text(ae));
                y.push_back(ae.y_sym);
                break;
            case EdgeKind::D:
                if (e.i >= x.size() || ae.x_sym != x[e.i] || ae.y_sym == kEps || ae.y_sym == ae.x_sym)
                    throw MalformedEdgeSet("substitution annotation inconsistent with x: " + edge_to_text(ae));
                y.push_back(ae.y_sym);
                break;
        }
        cur = e.head();
    }
    if (cur.i > x.size()) throw MalformedEdgeSet("edges run past the end of x");
    y.append(x, cur.i, x.size() - cur.i);
    return y;
}

std::optional<Alignment> restrict_alignment(const Alignment& a, Interval I, Interval J) {
    Point lo{I.lo, J.lo}, hi{I.hi, J.hi};
    std::size_t k = 0;
    Point cur = a.start;
    while (k < a.edges.size() && cur != lo) cur = a.edges[k++].head();
    if (cur != lo) return std::nullopt;
    Alignment out;
    out.start = lo;
    while (cur != hi && k < a.edges.size()) {
        out.edges.push_back(a.edges[k]);
        cur = a.edges[k++].head();
    }
    if (cur != hi) return std::nullopt;
    return out;
}

EdgeSet slice(const EdgeSet& edges, SliceKind kind, uint64_t index) {
    EdgeSet out;
    if (index == 0) return out;
    for (const auto& ae : edges) {
        const auto& e = ae.edge;
        if (kind == SliceKind::V && e.kind != EdgeKind::V && e.i == index - 1) out.push_back(ae);
        if (kind == SliceKind::H && e.kind != EdgeKind::H && e.j == index - 1) out.push_back(ae);
    }
    return out;
}

bool slice_discipline_ok(const EdgeSet& edges) {
    std::vector<uint64_t> vi, hj;
    for (const auto& ae : edges) {
        if (ae.edge.kind != EdgeKind::V) vi.push_back(ae.edge.i);
        if (ae.edge.kind != EdgeKind::H) hj.push_back(ae.edge.j);
    }
    std::sort(vi.begin(), vi.end());
    std::sort(hj.begin(), hj.end());
    return std::adjacent_find(vi.begin(), vi.end()) == vi.end() && std::adjacent_find(hj.begin(), hj.end()) == hj.end();
}

EdgeSet mirror(const EdgeSet& edges) {
    EdgeSet out;
    out.reserve(edges.size());
    for (const auto& ae : edges) {
        EdgeKind k = ae.edge.kind == EdgeKind::H ? EdgeKind::V : ae.edge.kind == EdgeKind::V ? EdgeKind::H : EdgeKind::D;
        out.push_back({{ae.edge.j, ae.edge.i, k}, ae.y_sym, ae.x_sym});
    }
    std::sort(out.begin(), out.end());
    return out;
}

EdgeSet shifted(const EdgeSet& edges, uint64_t di, uint64_t dj) {
    EdgeSet out = edges;
    for (auto& ae : out) ae.edge.i += di, ae.edge.j += dj;
    return out;
}

std::string edge_to_text(const AnnotatedEdge& e) {
    std::string coords = std::to_string(e.edge.i) + " " + std::to_string(e.edge.j);
    switch (e.edge.kind) {
        case EdgeKind::H: return "H " + coords;
        case EdgeKind::V: return "V " + coords;
        case EdgeKind::D:
            return "D " + coords + " " + std::to_string(static_cast<uint32_t>(e.x_sym)) + " " +
                   std::to_string(static_cast<uint32_t>(e.y_sym));
    }
    return {};
}

std::string edges_to_text(const EdgeSet& edges) {
    std::string out;
    for (const auto& e : edges) out += edge_to_text(e) + "\n";
    return out;
}

}  // namespace edsketch
