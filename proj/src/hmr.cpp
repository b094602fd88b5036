#include "edsketch/hmr.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "edsketch/errors.hpp"

namespace edsketch {

unsigned TreeShape::total_bits() const {
    unsigned t = 0;
    for (unsigned b : level_bits) t += b;
    return t;
}

U256 TreeShape::label(const U256& leaf, unsigned level) const {
    unsigned below = 0;
    for (unsigned m = level; m < depth(); ++m) below += level_bits[m];
    return (leaf >> below) & U256::low_mask(level_bits[level - 1]);
}

U256 TreeShape::prefix(const U256& leaf, unsigned d) const {
    unsigned below = 0;
    for (unsigned m = d; m < depth(); ++m) below += level_bits[m];
    return leaf >> below;
}

HmrParams make_hmr_params(const PrimeField& f, TreeShape shape, std::vector<unsigned> kappa_bits, uint32_t R,
                          double delta, const HmrConfig& cfg) {
    const unsigned d = shape.depth();
    if (kappa_bits.size() != d + 1) throw HypothesisViolated("capacity vector must have d+1 entries");
    for (unsigned j = 0; j < d; ++j)
        if (kappa_bits[j] < kappa_bits[j + 1]) throw HypothesisViolated("capacities must be non-increasing");
    if (kappa_bits[0] > 40) throw HypothesisViolated("root capacity above 2^40");
    if (R == 0) throw HypothesisViolated("overload parameter R must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw HypothesisViolated("delta must lie in (0,1)");
    const unsigned T = shape.total_bits();
    if (T > 254) throw HypothesisViolated("leaf domain wider than 254 bits");
    // 4(|D|−1)|S| ≤ p.
    if (T + kappa_bits[0] + 2 > 256 || (U256::low_mask(T) << (kappa_bits[0] + 2)) > f.modulus())
        throw HypothesisViolated("4(|D|-1)|S| <= p");
    if (cfg.strict_field_check && (2 * T + 2 >= f.bits()))
        throw HypothesisViolated("p >= 4*prod|L_j|^2");
    HmrParams p{std::move(shape), std::move(kappa_bits), R, delta, 1};
    p.ell = d == 0 ? 0 : redundancy(T * std::log(2.0), delta, cfg.redundancy_multiplier);
    return p;
}

Routing draw_routing(const HmrParams& p, const Stream& slot_stream) {
    Routing out;
    const unsigned d = p.shape.depth();
    for (unsigned j = 0; j < d; ++j) {
        Stream s = slot_stream.child(Tag::Level, j);
        unsigned dom = std::max(1u, p.shape.level_bits[j] + p.kappa_bits[j + 1]);
        out.r.push_back(PairwiseHash::draw(s, dom, p.kappa_bits[j]));
    }
    return out;
}

uint64_t leaf_to_root(const HmrParams& p, const Routing& routing, const U256& leaf) {
    uint64_t bucket = 0;
    for (int j = static_cast<int>(p.shape.depth()) - 1; j >= 0; --j) {
        U256 key = (p.shape.label(leaf, j + 1) << p.kappa_bits[j + 1]) | U256(bucket);
        bucket = routing.r[j].eval(key);
    }
    return bucket;
}

HmrSketch hmr_sketch(const PrimeField& f, const SparseSeq& u, const HmrParams& params, const Stream& stream) {
    HmrSketch sk{params, encode_path(stream.path()), {}, f.zero()};
    const unsigned T = params.shape.total_bits();
    for (const auto& [i, ui] : u)
        if (i.bit_length() > T) throw IndexOverflow("leaf index " + i.to_hex() + " outside the tree");
    if (params.shape.depth() == 0) {
        for (const auto& [i, ui] : u) sk.value = f.add(sk.value, ui);
        return sk;
    }
    for (uint64_t s = 0; s < params.ell; ++s) {
        Stream ss = stream.child(Tag::RedundancySlot, s);
        HmrSlot slot;
        slot.alpha = ss.nonzero_field_elem(f);
        Routing routing = draw_routing(params, ss);
        FixedBasePow apow(f, slot.alpha, std::max(4u, T));
        std::unordered_map<uint64_t, TraceVector> acc;
        for (const auto& [i, ui] : u) {
            if (f.is_zero(ui)) continue;
            uint64_t b = leaf_to_root(params, routing, i);
            TraceVector t = trace_with_power(f, i, ui, apow.pow(i));
            auto [it, fresh] = acc.try_emplace(b, t);
            if (!fresh) it->second = tv_add(f, it->second, t);
        }
        for (const auto& [b, t] : acc)
            if (!tv_is_zero(f, t)) slot.buckets.emplace_back(b, t);
        std::sort(slot.buckets.begin(), slot.buckets.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        sk.slots.push_back(std::move(slot));
    }
    return sk;
}

namespace {

void check_compatible(const HmrSketch& a, const HmrSketch& b) {
    if (!(a.params == b.params)) throw SketchMismatch("HMR sketch headers differ");
    if (a.path != b.path) throw SketchMismatch("HMR sketches derived from different streams");
    if (a.slots.size() != b.slots.size()) throw SketchMismatch("HMR slot counts differ");
    for (std::size_t s = 0; s < a.slots.size(); ++s)
        if (!(a.slots[s].alpha == b.slots[s].alpha)) throw SketchMismatch("HMR slot alphas differ");
}

std::vector<MismatchTriple> recover_slot(const PrimeField& f, const HmrSlot& a, const HmrSlot& b, unsigned T) {
    std::vector<TraceVector> diffs;
    auto consider = [&](const TraceVector& d) {
        if (!f.is_zero(d.value)) diffs.push_back(d);
    };
    std::size_t i = 0, j = 0;
    const TraceVector zero{};
    while (i < a.buckets.size() || j < b.buckets.size()) {
        if (j == b.buckets.size() || (i < a.buckets.size() && a.buckets[i].first < b.buckets[j].first)) {
            consider(tv_sub(f, a.buckets[i++].second, zero));
        } else if (i == a.buckets.size() || b.buckets[j].first < a.buckets[i].first) {
            consider(tv_sub(f, zero, b.buckets[j++].second));
        } else {
            consider(tv_sub(f, a.buckets[i++].second, b.buckets[j++].second));
        }
    }
    std::vector<FieldElem> values;
    values.reserve(diffs.size());
    for (const auto& d : diffs) values.push_back(d.value);
    std::vector<FieldElem> inv = batch_inverse(f, values);
    // A fixed-base table pays for itself after a handful of exponentiations.
    FixedBasePow apow;
    const bool table = diffs.size() > 16;
    if (table) apow = FixedBasePow(f, a.alpha, std::max(4u, T));
    std::vector<MismatchTriple> out;
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        MismatchTriple m = restore_with_inverse(f, diffs[k], inv[k]);
        if (m.index.bit_length() > T) continue;
        FieldElem pw = table ? apow.pow(m.index) : f.pow(a.alpha, m.index);
        if (!(f.mul(pw, f.sub(m.x_val, m.y_val)) == diffs[k].hash)) continue;
        out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<MismatchTriple> hmr_recover(const PrimeField& f, const HmrSketch& a, const HmrSketch& b) {
    check_compatible(a, b);
    if (a.params.shape.depth() == 0) {
        if (a.value == b.value) return {};
        return {MismatchTriple{U256(0), a.value, b.value}};
    }
    const unsigned T = a.params.shape.total_bits();
    std::vector<std::vector<MismatchTriple>> per;
    per.reserve(a.slots.size());
    for (std::size_t s = 0; s < a.slots.size(); ++s) per.push_back(recover_slot(f, a.slots[s], b.slots[s], T));
    std::vector<MismatchTriple> out = majority_vote(per);
    const uint64_t cap = uint64_t{1} << a.params.kappa_bits[0];
    if (out.size() > cap) {
        // Keep the κ_0 best-supported triples.
        std::map<MismatchTriple, uint64_t> votes;
        for (const auto& slot : per)
            for (const auto& m : slot) ++votes[m];
        std::stable_sort(out.begin(), out.end(),
                         [&](const auto& x, const auto& y) { return votes[x] > votes[y]; });
        out.resize(cap);
        std::sort(out.begin(), out.end());
    }
    return out;
}

namespace {

void put_le(std::vector<uint8_t>& out, uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint64_t get_le(const std::vector<uint8_t>& in, std::size_t& pos, int bytes) {
    if (pos + bytes > in.size()) throw FormatError("truncated HMR sketch");
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(in[pos++]) << (8 * i);
    return v;
}

uint64_t delta_fixed(double delta) {
    // δ as a 0.64 fixed-point fraction.
    double v = std::ldexp(delta, 64);
    return v >= 18446744073709551615.0 ? ~uint64_t{0} : static_cast<uint64_t>(v);
}

uint64_t header_size(const HmrParams& p, std::size_t path_bytes) {
    const uint64_t d = p.shape.depth();
    return 1 + 2 * d + (d + 1) + 4 + 8 + 8 + 2 + 1 + 4 + path_bytes;
}

}  // namespace

uint64_t hmr_dense_size(const PrimeField& f, const HmrParams& p, std::size_t path_bytes) {
    const uint64_t w = f.byte_width();
    if (p.shape.depth() == 0) return header_size(p, path_bytes) + w;
    return header_size(p, path_bytes) + p.ell * (w + (uint64_t{1} << p.kappa_bits[0]) * 4 * w);
}

void hmr_serialize(const PrimeField& f, const HmrSketch& sk, Encoding enc, std::vector<uint8_t>& out) {
    const HmrParams& p = sk.params;
    const unsigned d = p.shape.depth();
    // Header: d, level bits, capacity bits, R, δ, ℓ, domain bits, encoding, path.
    put_le(out, d, 1);
    for (unsigned b : p.shape.level_bits) put_le(out, b, 2);
    for (unsigned b : p.kappa_bits) put_le(out, b, 1);
    put_le(out, p.R, 4);
    put_le(out, delta_fixed(p.delta), 8);
    put_le(out, p.ell, 8);
    put_le(out, p.shape.total_bits(), 2);
    put_le(out, static_cast<uint8_t>(enc), 1);
    put_le(out, sk.path.size(), 4);
    out.insert(out.end(), sk.path.begin(), sk.path.end());
    if (d == 0) {
        f.serialize(sk.value, out);
        return;
    }
    auto put_tv = [&](const TraceVector& t) {
        f.serialize(t.value, out);
        f.serialize(t.product, out);
        f.serialize(t.square, out);
        f.serialize(t.hash, out);
    };
    const uint64_t S = uint64_t{1} << p.kappa_bits[0];
    for (const auto& slot : sk.slots) {
        f.serialize(slot.alpha, out);
        if (enc == Encoding::Dense) {
            std::size_t k = 0;
            const TraceVector zero{};
            for (uint64_t b = 0; b < S; ++b) {
                if (k < slot.buckets.size() && slot.buckets[k].first == b) put_tv(slot.buckets[k++].second);
                else put_tv(zero);
            }
        } else {
            put_le(out, slot.buckets.size(), 8);
            for (const auto& [b, t] : slot.buckets) {
                put_le(out, b, 8);
                put_tv(t);
            }
        }
    }
}

HmrSketch hmr_deserialize(const PrimeField& f, const std::vector<uint8_t>& in, std::size_t& pos) {
    HmrSketch sk;
    HmrParams& p = sk.params;
    const unsigned d = static_cast<unsigned>(get_le(in, pos, 1));
    for (unsigned j = 0; j < d; ++j) p.shape.level_bits.push_back(static_cast<unsigned>(get_le(in, pos, 2)));
    for (unsigned j = 0; j <= d; ++j) p.kappa_bits.push_back(static_cast<unsigned>(get_le(in, pos, 1)));
    if (p.kappa_bits[0] > 40) throw FormatError("root capacity above 2^40");
    p.R = static_cast<uint32_t>(get_le(in, pos, 4));
    p.delta = std::ldexp(static_cast<double>(get_le(in, pos, 8)), -64);
    p.ell = get_le(in, pos, 8);
    if (get_le(in, pos, 2) != p.shape.total_bits()) throw FormatError("HMR domain descriptor mismatch");
    uint64_t enc = get_le(in, pos, 1);
    if (enc > 1) throw FormatError("unknown HMR encoding");
    uint64_t path_len = get_le(in, pos, 4);
    if (pos + path_len > in.size()) throw FormatError("truncated HMR sketch");
    sk.path.assign(in.begin() + static_cast<std::ptrdiff_t>(pos), in.begin() + static_cast<std::ptrdiff_t>(pos + path_len));
    pos += path_len;
    const std::size_t w = f.byte_width();
    auto get_fe = [&]() {
        if (pos + w > in.size()) throw FormatError("truncated HMR sketch");
        FieldElem e = f.deserialize(&in[pos]);
        pos += w;
        return e;
    };
    auto get_tv = [&]() {
        TraceVector t;
        t.value = get_fe();
        t.product = get_fe();
        t.square = get_fe();
        t.hash = get_fe();
        return t;
    };
    if (d == 0) {
        sk.value = get_fe();
        return sk;
    }
    const uint64_t S = uint64_t{1} << p.kappa_bits[0];
    for (uint64_t s = 0; s < p.ell; ++s) {
        HmrSlot slot;
        slot.alpha = get_fe();
        if (enc == static_cast<uint64_t>(Encoding::Dense)) {
            for (uint64_t b = 0; b < S; ++b) {
                TraceVector t = get_tv();
                if (!tv_is_zero(f, t)) slot.buckets.emplace_back(b, t);
            }
        } else {
            uint64_t count = get_le(in, pos, 8);
            for (uint64_t k = 0; k < count; ++k) {
                uint64_t b = get_le(in, pos, 8);
                if (b >= S || (!slot.buckets.empty() && b <= slot.buckets.back().first))
                    throw FormatError("HMR bucket list not sorted or out of range");
                slot.buckets.emplace_back(b, get_tv());
            }
        }
        sk.slots.push_back(std::move(slot));
    }
    return sk;
}

LoadReport hmr_load_oracle(const std::set<U256>& leaves, const TreeShape& shape, const std::vector<unsigned>& kappa_bits,
                           uint32_t R) {
    LoadReport rep;
    const unsigned d = shape.depth();
    auto cap = [&](unsigned depth) { return uint64_t{1} << kappa_bits[depth]; };
    for (const U256& leaf : leaves) rep.load[{d, leaf}] = std::min<uint64_t>(cap(d), 1);
    for (int depth = static_cast<int>(d) - 1; depth >= 0; --depth) {
        std::map<U256, uint64_t> sums;
        for (const U256& leaf : leaves) sums[shape.prefix(leaf, depth)];  // ensure presence
        for (auto it = rep.load.lower_bound({depth + 1, U256(0)});
             it != rep.load.end() && it->first.first == static_cast<unsigned>(depth) + 1; ++it) {
            U256 parent = it->first.second >> shape.level_bits[depth];
            sums[parent] += it->second;
        }
        for (const auto& [v, s] : sums) rep.load[{static_cast<unsigned>(depth), v}] = std::min(cap(depth), s);
    }
    for (const U256& leaf : leaves) {
        bool ok = true;
        for (unsigned depth = 0; depth < d && ok; ++depth)
            ok = rep.load[{depth, shape.prefix(leaf, depth)}] * R < cap(depth);
        if (ok) rep.accessible.insert(leaf);
    }
    return rep;
}

}  // namespace edsketch
