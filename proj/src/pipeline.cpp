#include "edsketch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "edsketch/errors.hpp"

namespace edsketch {

namespace {

unsigned ceil_log2(double a) {
    if (!(a > 1.0)) return 0;
    int e = 0;
    double m = std::frexp(a, &e);  // a = m·2^e with m ∈ [0.5, 1)
    return static_cast<unsigned>(m == 0.5 ? e - 1 : e);
}

unsigned log2_exact(uint64_t n) { return static_cast<unsigned>(63 - __builtin_clzll(n)); }

}  // namespace

uint64_t ceil_pow2(double a) { return uint64_t{1} << ceil_log2(a); }

Profile desk_profile() { return Profile{}; }

Profile paper_profile(uint64_t n) {
    Profile p;
    p.name = "paper";
    const double lg = std::log2(static_cast<double>(std::max<uint64_t>(n, 2)));
    p.c_split = std::pow(lg, 4);
    p.c_eh = 1.0;
    p.polylog = std::pow(lg, 6);
    p.redundancy_multiplier = 8.0;
    p.rho = static_cast<uint32_t>(10 * lg + 50);
    p.gap = GapConfig{GapKind::Cgk, 4.0, 8};
    return p;
}

Profile profile_by_name(const std::string& name, uint64_t n) {
    if (name == "desk") return desk_profile();
    if (name == "paper") return paper_profile(n);
    throw FormatError("unknown profile '" + name + "' (expected desk or paper)");
}

uint64_t Params::sparsity(unsigned level) const {
    return k_bits[level] >= 40 ? uint64_t{1} << 40 : uint64_t{1} << k_bits[level];
}

std::vector<unsigned> Params::location_capacity_bits(unsigned j) const {
    std::vector<unsigned> out;
    for (unsigned i = 0; i <= j; ++i) out.push_back(kappa_bits[std::min<unsigned>(i / s, d)]);
    return out;
}

bool operator==(const Params& a, const Params& b) {
    return a.n == b.n && a.k == b.k && a.s == b.s && a.d == b.d && a.P == b.P && a.profile == b.profile &&
           a.t == b.t && a.k_bits == b.k_bits && a.kappa_bits == b.kappa_bits && a.c_split == b.c_split &&
           a.c_eh == b.c_eh && a.c_load == b.c_load && a.polylog == b.polylog &&
           a.redundancy_multiplier == b.redundancy_multiplier && a.rho == b.rho && a.gap.kind == b.gap.kind &&
           a.gap.c_ted == b.gap.c_ted && a.gap.gram == b.gap.gram && a.decomp.c_frag == b.decomp.c_frag &&
           a.decomp.window == b.decomp.window && a.p == b.p && a.u_bits == b.u_bits && a.R_gram == b.R_gram &&
           a.R_loc == b.R_loc && a.delta == b.delta && a.trivial == b.trivial;
}

Params params_formula(uint64_t k, uint64_t n, double P, const Profile& profile) {
    Params p;
    p.n = n;
    p.k = k;
    p.P = P;
    p.s = n >= 2 ? log2_exact(n) : 0;
    p.profile = profile.name;
    p.c_split = profile.c_split;
    p.c_eh = profile.c_eh;
    p.polylog = profile.polylog;
    p.redundancy_multiplier = profile.redundancy_multiplier;
    p.rho = profile.rho;
    p.gap = profile.gap;
    p.decomp = profile.decomp;
    p.p = PrimeField::default_modulus();
    p.delta = 1.0 / std::pow(static_cast<double>(n), 4);
    p.trivial = static_cast<double>(k) >= static_cast<double>(n) / (40.0 * P);

    const unsigned t0_bits = ceil_log2(20.0 * static_cast<double>(k) * P);
    p.d = p.trivial ? 0 : t0_bits;
    for (unsigned i = 0; i <= p.d; ++i) p.t.push_back(uint64_t{1} << (p.d - i));
    // k_j ≥ κ_{j−1}·2ĉ_split/ĉ_load together with κ_j ≥ 8ĉ_load·polylog·t_j
    // forces c_k ≥ 32·ĉ_split·polylog; ĉ_load = 2P·c_k is the least value
    // meeting t_j ≥ 2P·k_j/ĉ_load.
    // Rounding c_κ up to a power of two can cost a factor 2 in the first
    // inequality, so c_k is doubled until c_k²·P ≥ 2·c_κ·ĉ_split holds.
    unsigned ck_bits = ceil_log2(32.0 * profile.c_split * profile.polylog);
    unsigned ckappa_bits = 0;
    for (;;) {
        const double ck = std::ldexp(1.0, static_cast<int>(ck_bits));
        p.c_load = 2.0 * P * ck;
        ckappa_bits = std::max(ceil_log2(8.0 * p.c_load * profile.polylog), ck_bits + 2);
        if (ck * ck * P >= 2.0 * std::ldexp(1.0, static_cast<int>(ckappa_bits)) * profile.c_split) break;
        ++ck_bits;
    }
    for (unsigned i = 0; i <= p.d; ++i) {
        p.k_bits.push_back(ck_bits + (p.d - i));
        p.kappa_bits.push_back(ckappa_bits + (p.d - i));
    }
    p.R_gram = 4 * (p.d + 1);
    p.R_loc = 4 * p.d * p.s;
    return p;
}

Params derive_params(uint64_t k, uint64_t n, double P, const Profile& profile, const PrimeField& f) {
    if (k < 1) throw ConstraintViolated("k >= 1");
    if (!(P >= 1.0)) throw ConstraintViolated("P >= 1");
    if (n < 2 || (n & (n - 1)) != 0) throw ConstraintViolated("n is a power of two");
    if (n > (uint64_t{1} << 32)) throw ConstraintViolated("n <= 2^32");
    Params p = params_formula(k, n, P, profile);
    p.p = f.modulus();
    if (p.trivial) return p;

    if (static_cast<double>(n) < 40.0 * static_cast<double>(k) * P) throw ConstraintViolated("n >= 40kP");
    if (p.t[p.d] != 1) throw ConstraintViolated("t_d = 1");
    auto pw = [](unsigned bits) { return std::ldexp(1.0, static_cast<int>(bits)); };
    const double lg = std::log2(static_cast<double>(n));
    for (unsigned j = 1; j <= p.d; ++j) {
        const double kj = pw(p.k_bits[j]), kap = pw(p.kappa_bits[j]), kap_prev = pw(p.kappa_bits[j - 1]);
        const double tj = static_cast<double>(p.t[j]);
        if (kj < kap_prev * 2.0 * p.c_split / p.c_load)
            throw ConstraintViolated("k_j >= kappa_{j-1} * 2 c_split / c_load (j=" + std::to_string(j) + ")");
        if (tj < 2.0 * P * kj / p.c_load)
            throw ConstraintViolated("t_j >= 2P k_j / c_load (j=" + std::to_string(j) + ")");
        if (kap < 8.0 * p.c_load * p.polylog * tj)
            throw ConstraintViolated("kappa_j >= 8 c_load polylog t_j (j=" + std::to_string(j) + ")");
        if (kap < 4.0 * kj) throw ConstraintViolated("kappa_j >= 4 k_j (j=" + std::to_string(j) + ")");
    }
    if (p.c_load < p.c_eh * lg * lg) throw ConstraintViolated("c_load >= c_EH log^2 n");

    // 4(|D|−1)|S| ≤ p for the widest grammar and location instances.
    auto field_ok = [&](unsigned T, unsigned sbits) {
        return T + sbits + 2 <= 256 && (U256::low_mask(T) << (sbits + 2)) <= f.modulus();
    };
    if (!field_ok(p.d * p.s + p.u_bits, p.kappa_bits[0]))
        throw FieldTooSmall("4(|D|-1)|S| <= p fails for the level-d grammar sketch");
    if (!field_ok(p.d * p.s - 1, p.kappa_bits[0]))
        throw FieldTooSmall("4(|D|-1)|S| <= p fails for the deepest location sketch");
    if (p.kappa_bits[0] > 40) throw ConstraintViolated("kappa_0 <= 2^40");
    // Location values (n+1)·fingerprint + size must stay below p.
    U256 enc(n + 1);
    U256::mul_add_small(enc, kM61, n);
    if (enc >= f.modulus()) throw EncodingOverflow("(n+1)·q + n >= p");
    return p;
}

Layout make_layout(const Params& p, const PrimeField& f) {
    Layout L;
    HmrConfig cfg{p.redundancy_multiplier, false};
    for (unsigned j = 1; j <= p.d; ++j) {
        TreeShape shape;
        shape.level_bits.assign(j, p.s);
        shape.level_bits.push_back(p.u_bits);
        std::vector<unsigned> kap(p.kappa_bits.begin(), p.kappa_bits.begin() + j + 1);
        kap.push_back(0);
        L.grammar.push_back(make_hmr_params(f, std::move(shape), std::move(kap), p.R_gram, p.delta, cfg));
    }
    for (unsigned j = 0; j < p.d * p.s; ++j) {
        TreeShape shape;
        shape.level_bits.assign(j, 1);
        L.location.push_back(make_hmr_params(f, std::move(shape), p.location_capacity_bits(j), p.R_loc, p.delta, cfg));
    }
    return L;
}

uint64_t DecompBundle::rule_count(unsigned level) const {
    uint64_t c = 0;
    if (level < levels.size())
        for (const auto& v : levels[level]) c += v.grammar.size();
    return c;
}

Stream repetition_stream(const Seed& seed, uint64_t rep) { return Stream(seed, {{Tag::Repetition, rep}}); }

Stream node_stream(const Stream& rep, unsigned level, const U256& addr, unsigned s) {
    Stream st = rep.child(Tag::Level, level);
    for (unsigned i = 0; i < level; ++i) {
        U256 digit = (addr >> (s * (level - 1 - i))) & U256::low_mask(s);
        st = st.child(Tag::NodeDigit, digit.low64());
    }
    return st;
}

DecompBundle main_decomp(const SymString& x, const Params& p, const Stream& rep, const PrimeField& f) {
    if (x.size() > p.n) throw InputTooLong("input of length " + std::to_string(x.size()) + " exceeds n");
    DecompBundle b;
    b.levels.resize(p.d + 1);
    b.levels[0].push_back(TreeNode{0, U256(0), 0, x, {}, f.zero()});
    for (unsigned j = 0; j < p.d; ++j) {
        for (const TreeNode& v : b.levels[j]) {
            if (v.text.empty()) continue;
            Decomposition dec = basic_decomp(v.text, p.n, p.sparsity(j + 1), node_stream(rep, j, v.addr, p.s), p.decomp);
            b.stats.resplits += dec.stats.resplits;
            b.stats.chunked += dec.stats.chunked;
            b.stats.salts += dec.stats.salts;
            b.stats.trivial_fallback = b.stats.trivial_fallback || dec.stats.trivial_fallback;
            for (Fragment& fr : dec.fragments) {
                TreeNode c;
                c.level = j + 1;
                c.addr = (v.addr << p.s) | U256(fr.index);
                c.start = v.start + fr.start;
                Stream ps = node_stream(rep, j + 1, c.addr, p.s).child(Purpose::GapPrint);
                c.print = GapFingerprinter(p.gap, p.n, p.t[j + 1], ps).field_value(f, fr.text);
                c.text = std::move(fr.text);
                c.grammar = std::move(fr.grammar);
                b.levels[j + 1].push_back(std::move(c));
            }
        }
    }
    // Binary refinement, bottom-up from the level-d leaves.
    const unsigned depth = p.d * p.s;
    b.binary.resize(depth + 1);
    if (p.d == 0) return b;
    Stream krs = rep.child(Purpose::KarpRabin);
    KarpRabin kr(p.n, krs);
    for (const TreeNode& v : b.levels[p.d]) b.binary[depth][v.addr] = BinNode{v.text.size(), kr.raw(v.text), 0};
    for (int lvl = static_cast<int>(depth) - 1; lvl >= 0; --lvl) {
        std::map<U256, std::pair<BinNode, BinNode>> parents;
        for (const auto& [addr, node] : b.binary[lvl + 1]) {
            auto& slot = parents[addr >> 1];
            (addr.bit(0) ? slot.second : slot.first) = node;
        }
        for (const auto& [addr, lr] : parents) {
            const auto& [l, r] = lr;
            b.binary[lvl][addr] = BinNode{l.len + r.len, kr.combine(l.kr_raw, l.len, r.kr_raw), l.len};
        }
    }
    return b;
}

std::vector<HmrSketch> grammar_condense(const DecompBundle& b, const Params& p, const Layout& layout,
                                        const Stream& rep, const PrimeField& f) {
    std::vector<HmrSketch> out;
    Stream gs = rep.child(Purpose::Grammar);
    for (unsigned j = 1; j <= p.d; ++j) {
        SparseSeq seq;
        for (const TreeNode& v : b.levels[j])
            for (RuleId r : v.grammar.rules) seq.push_back({(v.addr << p.u_bits) | U256::from_u128(r), v.print});
        out.push_back(hmr_sketch(f, seq, layout.grammar[j - 1], gs.child(Tag::Level, j)));
    }
    return out;
}

std::vector<HmrSketch> location_condense(const DecompBundle& b, const Params& p, const Layout& layout,
                                         const Stream& rep, const PrimeField& f) {
    std::vector<HmrSketch> out;
    Stream ls = rep.child(Purpose::Location);
    for (unsigned j = 0; j < p.d * p.s; ++j) {
        SparseSeq seq;
        for (const auto& [addr, node] : b.binary[j]) {
            // (n+1)·fingerprint + left size; fingerprints are ≥ 1 so the value is nonzero.
            U256 v(p.n + 1);
            U256::mul_add_small(v, node.kr_raw + 1, node.left_size);
            seq.push_back({addr, f.from_u256(v)});
        }
        out.push_back(hmr_sketch(f, seq, layout.location[j], ls.child(Tag::Level, j)));
    }
    return out;
}

EdSketch ed_sketch(const SymString& x, const Params& p, const Seed& seed, const PrimeField& f) {
    if (x.size() > p.n) throw InputTooLong("input of length " + std::to_string(x.size()) + " exceeds n");
    EdSketch sk;
    sk.params = p;
    sk.seed = seed;
    if (p.trivial) {
        sk.verbatim = x;
        sk.top = f.zero();
        return sk;
    }
    Stream ts(seed, {{Tag::Purpose, static_cast<uint64_t>(Purpose::TopPrint)}});
    sk.top = GapFingerprinter(p.gap, p.n, p.t[0], ts).field_value(f, x);
    Layout layout = make_layout(p, f);
    for (uint32_t i = 0; i < p.rho; ++i) {
        Stream rep = repetition_stream(seed, i);
        DecompBundle b = main_decomp(x, p, rep, f);
        sk.reps.push_back(MainSketch{grammar_condense(b, p, layout, rep, f), location_condense(b, p, layout, rep, f)});
    }
    return sk;
}

EdSketch ed_sketch(const SymString& x, uint64_t k, uint64_t n, double P, const Seed& seed, const Profile& profile,
                   const PrimeField& f) {
    return ed_sketch(x, derive_params(k, n, P, profile, f), seed, f);
}

FoundStrings find_strings(const std::vector<HmrSketch>& sx, const std::vector<HmrSketch>& sy, const Params& p,
                          const PrimeField& f) {
    if (sx.size() != p.d || sy.size() != p.d) throw SketchMismatch("grammar sketch count differs from d");
    FoundStrings out;
    const U256 mask = U256::low_mask(p.u_bits);
    for (unsigned j = 1; j <= p.d; ++j) {
        std::map<U256, std::pair<Grammar, Grammar>> grams;
        for (const MismatchTriple& m : hmr_recover(f, sx[j - 1], sy[j - 1])) {
            auto& g = grams[m.index >> p.u_bits];
            RuleId r = (m.index & mask).low128();
            if (!f.is_zero(m.x_val)) g.first.rules.push_back(r);
            if (!f.is_zero(m.y_val)) g.second.rules.push_back(r);
        }
        for (auto& [addr, g] : grams) {
            std::sort(g.first.rules.begin(), g.first.rules.end());
            std::sort(g.second.rules.begin(), g.second.rules.end());
            auto dx = basic_decode(g.first, p.n);
            auto dy = basic_decode(g.second, p.n);
            if (dx && dy) out.nodes[{j, addr}] = {std::move(*dx), std::move(*dy)};
        }
    }
    return out;
}

FoundStarts find_locations(const std::vector<HmrSketch>& lx, const std::vector<HmrSketch>& ly,
                           const FoundStrings& strs, const Params& p, const PrimeField& f) {
    const unsigned depth = p.d * p.s;
    if (lx.size() != depth || ly.size() != depth) throw SketchMismatch("location sketch count differs from ds");
    std::vector<std::map<U256, std::pair<uint64_t, uint64_t>>> sizes(depth);
    for (unsigned j = 0; j < depth; ++j) {
        for (const MismatchTriple& m : hmr_recover(f, lx[j], ly[j])) {
            U256 a = f.to_u256(m.x_val), b = f.to_u256(m.y_val);
            sizes[j][m.index] = {U256::divmod_small(a, p.n + 1), U256::divmod_small(b, p.n + 1)};
        }
    }
    FoundStarts out;
    for (const auto& [key, val] : strs.nodes) {
        const auto& [level, addr] = key;
        const unsigned B = level * p.s;
        uint64_t sx = 0, sy = 0;
        bool defined = true;
        for (unsigned b = 0; b < B && defined; ++b) {
            if (!addr.bit(B - 1 - b)) continue;  // u is a left ancestor iff v continues right below it
            auto it = sizes[b].find(addr >> (B - b));
            if (it == sizes[b].end()) {
                defined = false;
            } else {
                sx += it->second.first;
                sy += it->second.second;
            }
        }
        if (defined) out.nodes[key] = {sx, sy};
    }
    return out;
}

EdgeSet main_reconstruct(const MainSketch& a, const MainSketch& b, const Params& p, const PrimeField& f) {
    FoundStrings strs = find_strings(a.str, b.str, p, f);
    FoundStarts starts = find_locations(a.loc, b.loc, strs, p, f);
    std::set<AnnotatedEdge> candids;
    for (const auto& [key, st] : starts.nodes) {
        const auto& [level, addr] = key;
        bool top = true;
        for (unsigned l = 1; l < level && top; ++l)
            top = !starts.nodes.count({l, addr >> (p.s * (level - l))});
        if (!top) continue;
        const auto& [fx, fy] = strs.nodes.at(key);
        EdgeSet e = shifted(costly_annotated(fx, fy, canonical_alignment(fx, fy)), st.first, st.second);
        candids.insert(e.begin(), e.end());
    }
    return EdgeSet(candids.begin(), candids.end());
}

namespace {

void check_compatible(const EdSketch& a, const EdSketch& b) {
    if (!(a.params == b.params)) throw IncompatibleSketch("sketch parameters differ");
    if (a.seed != b.seed) throw IncompatibleSketch("sketches use different seeds");
    if (a.reps.size() != b.reps.size()) throw IncompatibleSketch("repetition counts differ");
}

EdResult finish(EdgeSet edges, uint64_t k) {
    EdResult r;
    r.slice_discipline = slice_discipline_ok(edges);
    if (edges.size() > k) {
        r.large = true;
        r.large_reason = "too-many-edges";
        return r;
    }
    r.distance = edges.size();
    r.edges = std::move(edges);
    return r;
}

}  // namespace

EdResult ed_recover(const EdSketch& a, const EdSketch& b, const PrimeField& f) {
    check_compatible(a, b);
    const Params& p = a.params;
    if (p.trivial) {
        const SymString &x = a.verbatim, &y = b.verbatim;
        return finish(costly_annotated(x, y, canonical_alignment(x, y)), p.k);
    }
    if (!(a.top == b.top)) {
        EdResult r;
        r.large = true;
        r.large_reason = "top-fingerprint";
        return r;
    }
    std::map<AnnotatedEdge, uint32_t> votes;
    for (std::size_t i = 0; i < a.reps.size(); ++i)
        for (const AnnotatedEdge& e : main_reconstruct(a.reps[i], b.reps[i], p, f)) ++votes[e];
    EdgeSet found;
    for (const auto& [e, c] : votes)
        if (2 * static_cast<uint64_t>(c) > a.reps.size()) found.push_back(e);
    return finish(std::move(found), p.k);
}

namespace {

constexpr uint16_t kFormatVersion = 1;

struct Writer {
    std::vector<uint8_t>& out;
    void u(uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void dbl(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u(bits, 8);
    }
    void raw(const uint8_t* p, std::size_t n) { out.insert(out.end(), p, p + n); }
};

struct Reader {
    const std::vector<uint8_t>& in;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > in.size()) throw FormatError("truncated sketch");
    }
    uint64_t u(int bytes) {
        need(bytes);
        uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(in[pos++]) << (8 * i);
        return v;
    }
    double dbl() {
        uint64_t bits = u(8);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

void write_params(Writer& w, const Params& p) {
    w.u(p.n, 8);
    w.u(p.k, 8);
    w.u(p.s, 1);
    w.u(p.d, 1);
    w.dbl(p.P);
    w.u(p.profile.size(), 1);
    w.raw(reinterpret_cast<const uint8_t*>(p.profile.data()), p.profile.size());
    for (uint64_t t : p.t) w.u(t, 8);
    for (unsigned b : p.k_bits) w.u(b, 1);
    for (unsigned b : p.kappa_bits) w.u(b, 1);
    w.dbl(p.c_split);
    w.dbl(p.c_eh);
    w.dbl(p.c_load);
    w.dbl(p.polylog);
    w.dbl(p.redundancy_multiplier);
    w.u(p.rho, 4);
    w.u(static_cast<uint8_t>(p.gap.kind), 1);
    w.dbl(p.gap.c_ted);
    w.u(p.gap.gram, 1);
    w.dbl(p.decomp.c_frag);
    w.u(p.decomp.window, 1);
    uint8_t pb[32];
    p.p.to_le_bytes(pb, 32);
    w.raw(pb, 32);
    w.u(p.u_bits, 1);
    w.u(p.R_gram, 4);
    w.u(p.R_loc, 4);
    w.dbl(p.delta);
    w.u(p.trivial ? 1 : 0, 1);
}

Params read_params(Reader& r) {
    Params p;
    p.n = r.u(8);
    p.k = r.u(8);
    p.s = static_cast<unsigned>(r.u(1));
    p.d = static_cast<unsigned>(r.u(1));
    p.P = r.dbl();
    uint64_t len = r.u(1);
    r.need(len);
    p.profile.assign(reinterpret_cast<const char*>(&r.in[r.pos]), len);
    r.pos += len;
    for (unsigned i = 0; i <= p.d; ++i) p.t.push_back(r.u(8));
    for (unsigned i = 0; i <= p.d; ++i) p.k_bits.push_back(static_cast<unsigned>(r.u(1)));
    for (unsigned i = 0; i <= p.d; ++i) p.kappa_bits.push_back(static_cast<unsigned>(r.u(1)));
    p.c_split = r.dbl();
    p.c_eh = r.dbl();
    p.c_load = r.dbl();
    p.polylog = r.dbl();
    p.redundancy_multiplier = r.dbl();
    p.rho = static_cast<uint32_t>(r.u(4));
    uint64_t kind = r.u(1);
    if (kind > 2) throw FormatError("unknown gap fingerprint kind");
    p.gap.kind = static_cast<GapKind>(kind);
    p.gap.c_ted = r.dbl();
    p.gap.gram = static_cast<unsigned>(r.u(1));
    p.decomp.c_frag = r.dbl();
    p.decomp.window = static_cast<unsigned>(r.u(1));
    r.need(32);
    p.p = U256::from_le_bytes(&r.in[r.pos], 32);
    r.pos += 32;
    p.u_bits = static_cast<unsigned>(r.u(1));
    p.R_gram = static_cast<uint32_t>(r.u(4));
    p.R_loc = static_cast<uint32_t>(r.u(4));
    p.delta = r.dbl();
    p.trivial = r.u(1) != 0;
    return p;
}

std::vector<uint8_t> header_bytes(const EdSketch& sk, const PrimeField& f) {
    std::vector<uint8_t> out;
    Writer w{out};
    w.raw(reinterpret_cast<const uint8_t*>("EDSK"), 4);
    w.u(kFormatVersion, 2);
    write_params(w, sk.params);
    w.raw(sk.seed.data(), sk.seed.size());
    f.serialize(sk.top, out);
    return out;
}

}  // namespace

std::vector<uint8_t> serialize_sketch(const EdSketch& sk, Encoding enc, const PrimeField& f) {
    std::vector<uint8_t> out = header_bytes(sk, f);
    Writer w{out};
    if (sk.params.trivial) {
        w.u(sk.verbatim.size(), 4);
        for (Symbol c : sk.verbatim) w.u(c, 4);
        return out;
    }
    w.u(sk.reps.size(), 4);
    for (const MainSketch& m : sk.reps) {
        for (const auto* group : {&m.str, &m.loc}) {
            for (const HmrSketch& h : *group) {
                std::vector<uint8_t> body;
                hmr_serialize(f, h, enc, body);
                w.u(body.size(), 8);
                w.raw(body.data(), body.size());
            }
        }
    }
    return out;
}

EdSketch deserialize_sketch(const std::vector<uint8_t>& bytes, const PrimeField& f) {
    Reader r{bytes};
    r.need(6);
    if (std::memcmp(bytes.data(), "EDSK", 4) != 0) throw FormatError("missing EDSK magic");
    r.pos = 4;
    if (r.u(2) != kFormatVersion) throw FormatError("unsupported sketch format version");
    EdSketch sk;
    sk.params = read_params(r);
    r.need(32);
    std::memcpy(sk.seed.data(), &bytes[r.pos], 32);
    r.pos += 32;
    r.need(f.byte_width());
    sk.top = f.deserialize(&bytes[r.pos]);
    r.pos += f.byte_width();
    if (sk.params.trivial) {
        uint64_t len = r.u(4);
        for (uint64_t i = 0; i < len; ++i) sk.verbatim.push_back(static_cast<Symbol>(r.u(4)));
    } else {
        uint64_t reps = r.u(4);
        const Params& p = sk.params;
        for (uint64_t i = 0; i < reps; ++i) {
            MainSketch m;
            for (unsigned j = 0; j < p.d + p.d * p.s; ++j) {
                uint64_t len = r.u(8);
                r.need(len);
                std::size_t pos = r.pos;
                HmrSketch h = hmr_deserialize(f, bytes, pos);
                if (pos != r.pos + len) throw FormatError("HMR sketch length mismatch");
                r.pos = pos;
                (j < p.d ? m.str : m.loc).push_back(std::move(h));
            }
            sk.reps.push_back(std::move(m));
        }
    }
    if (r.pos != bytes.size()) throw FormatError("trailing bytes after sketch");
    return sk;
}

uint64_t dense_sketch_size(const Params& p, const PrimeField& f) {
    EdSketch empty;
    empty.params = p;
    empty.top = f.zero();
    uint64_t total = header_bytes(empty, f).size() + 4;
    if (p.trivial) return total;
    Layout layout = make_layout(p, f);
    for (uint32_t i = 0; i < p.rho; ++i) {
        Stream rep = repetition_stream(empty.seed, i);
        for (unsigned j = 1; j <= p.d; ++j) {
            std::size_t path = encode_path(rep.child(Purpose::Grammar).child(Tag::Level, j).path()).size();
            total += 8 + hmr_dense_size(f, layout.grammar[j - 1], path);
        }
        for (unsigned j = 0; j < p.d * p.s; ++j) {
            std::size_t path = encode_path(rep.child(Purpose::Location).child(Tag::Level, j).path()).size();
            total += 8 + hmr_dense_size(f, layout.location[j], path);
        }
    }
    return total;
}

}  // namespace edsketch
