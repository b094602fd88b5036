#include "edsketch/mrs.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "edsketch/errors.hpp"

namespace edsketch {

TraceVector trace_with_power(const PrimeField& f, const U256& i, const FieldElem& u, const FieldElem& alpha_pow_i) {
    return {u, f.mul(f.from_u256(i), u), f.sqr(u), f.mul(alpha_pow_i, u)};
}

TraceVector trace(const PrimeField& f, const U256& i, const FieldElem& u, const FieldElem& alpha) {
    return trace_with_power(f, i, u, f.pow(alpha, i));
}

TraceVector tv_add(const PrimeField& f, const TraceVector& a, const TraceVector& b) {
    return {f.add(a.value, b.value), f.add(a.product, b.product), f.add(a.square, b.square), f.add(a.hash, b.hash)};
}

TraceVector tv_sub(const PrimeField& f, const TraceVector& a, const TraceVector& b) {
    return {f.sub(a.value, b.value), f.sub(a.product, b.product), f.sub(a.square, b.square), f.sub(a.hash, b.hash)};
}

bool tv_is_zero(const PrimeField& f, const TraceVector& t) {
    return f.is_zero(t.value) && f.is_zero(t.product) && f.is_zero(t.square) && f.is_zero(t.hash);
}

MismatchTriple restore(const PrimeField& f, const TraceVector& t) {
    if (f.is_zero(t.value)) throw ZeroValue("restore of a trace with zero value component");
    return restore_with_inverse(f, t, f.inv(t.value));
}

MismatchTriple restore_with_inverse(const PrimeField& f, const TraceVector& t, const FieldElem& inv_v) {
    // 1/(2v) = (1/v)·(p+1)/2, so a single inversion suffices.
    static thread_local U256 cached_p;
    static thread_local FieldElem half;
    if (!(cached_p == f.modulus())) {
        cached_p = f.modulus();
        half = f.from_u256((f.modulus() + U256(1)) >> 1);
    }
    FieldElem v2 = f.sqr(t.value);
    FieldElem inv_2v = f.mul(inv_v, half);
    MismatchTriple m;
    m.index = f.to_u256(f.mul(t.product, inv_v));
    m.x_val = f.mul(f.add(t.square, v2), inv_2v);
    m.y_val = f.mul(f.sub(t.square, v2), inv_2v);
    return m;
}

namespace {

// Slot-independent parts of each trace, shared by every redundancy slot.
struct Prepared {
    U256 index;
    FieldElem value, product, square;
};

std::vector<Prepared> prepare(const PrimeField& f, const SparseSeq& u, const U256& domain_size) {
    std::vector<Prepared> out;
    out.reserve(u.size());
    for (const auto& [i, ui] : u) {
        if (i >= domain_size) throw IndexOverflow("index " + i.to_dec() + " outside the domain");
        if (f.is_zero(ui)) continue;
        out.push_back({i, ui, f.mul(f.from_u256(i), ui), f.sqr(ui)});
    }
    return out;
}

SuperSketch sketch_prepared(const PrimeField& f, const std::vector<Prepared>& u, const U256& domain_size,
                            const FieldElem& alpha, const PairwiseHash& h) {
    SuperSketch sk{domain_size, alpha, h, std::vector<TraceVector>(std::size_t{1} << h.range_bits)};
    FixedBasePow apow(f, alpha, std::max(4u, domain_size.bit_length()));
    for (const auto& e : u) {
        auto& b = sk.buckets[h.eval(e.index)];
        b = tv_add(f, b, {e.value, e.product, e.square, f.mul(apow.pow(e.index), e.value)});
    }
    return sk;
}

}  // namespace

SuperSketch super_sketch(const PrimeField& f, const SparseSeq& u, const U256& domain_size, const FieldElem& alpha,
                         const PairwiseHash& h) {
    if (domain_size > f.modulus()) throw HypothesisViolated("domain size exceeds the field modulus");
    return sketch_prepared(f, prepare(f, u, domain_size), domain_size, alpha, h);
}

namespace {

bool same_hash(const PairwiseHash& a, const PairwiseHash& b) {
    return a.a == b.a && a.b == b.b && a.domain_bits == b.domain_bits && a.range_bits == b.range_bits;
}

}  // namespace

std::vector<MismatchTriple> super_recover(const PrimeField& f, const SuperSketch& sk_u, const SuperSketch& sk_w) {
    if (!(sk_u.alpha == sk_w.alpha) || !same_hash(sk_u.h, sk_w.h) || sk_u.domain_size != sk_w.domain_size ||
        sk_u.buckets.size() != sk_w.buckets.size())
        throw SketchMismatch("superposition sketches built with different (alpha, hash, domain)");
    std::vector<TraceVector> diffs;
    std::vector<FieldElem> values;
    for (std::size_t b = 0; b < sk_u.buckets.size(); ++b) {
        TraceVector d = tv_sub(f, sk_u.buckets[b], sk_w.buckets[b]);
        if (f.is_zero(d.value)) continue;
        diffs.push_back(d);
        values.push_back(d.value);
    }
    const auto inverses = batch_inverse(f, values);
    std::vector<MismatchTriple> out;
    for (std::size_t b = 0; b < diffs.size(); ++b) {
        const TraceVector& d = diffs[b];
        MismatchTriple m = restore_with_inverse(f, d, inverses[b]);
        // Filtering: index in range, and the hash component must match a
        // single mismatch at that index.
        if (m.index >= sk_u.domain_size) continue;
        if (!(f.mul(f.pow(sk_u.alpha, m.index), f.sub(m.x_val, m.y_val)) == d.hash)) continue;
        out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<uint8_t> serialize(const PrimeField& f, const SuperSketch& sk) {
    std::vector<uint8_t> out;
    for (int i = 31; i >= 0; --i) out.push_back(static_cast<uint8_t>(sk.domain_size.limb[i / 8] >> (8 * (i % 8))));
    uint64_t S = sk.buckets.size();
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(S >> (8 * i)));
    f.serialize(sk.alpha, out);
    auto put128 = [&](u128 v) {
        for (int i = 0; i < 16; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    };
    for (u128 a : sk.h.a) put128(a);
    put128(sk.h.b);
    out.push_back(static_cast<uint8_t>(sk.h.domain_bits));
    out.push_back(static_cast<uint8_t>(sk.h.domain_bits >> 8));
    out.push_back(static_cast<uint8_t>(sk.h.range_bits));
    for (const auto& t : sk.buckets) {
        f.serialize(t.value, out);
        f.serialize(t.product, out);
        f.serialize(t.square, out);
        f.serialize(t.hash, out);
    }
    return out;
}

SuperSketch deserialize_super_sketch(const PrimeField& f, const std::vector<uint8_t>& in) {
    std::size_t pos = 0;
    auto need = [&](std::size_t k) {
        if (pos + k > in.size()) throw FormatError("truncated superposition sketch");
    };
    SuperSketch sk;
    need(32);
    for (int i = 31; i >= 0; --i) sk.domain_size.limb[i / 8] |= static_cast<uint64_t>(in[pos++]) << (8 * (i % 8));
    need(8);
    uint64_t S = 0;
    for (int i = 0; i < 8; ++i) S |= static_cast<uint64_t>(in[pos++]) << (8 * i);
    const std::size_t w = f.byte_width();
    need(w);
    sk.alpha = f.deserialize(&in[pos]);
    pos += w;
    auto get128 = [&]() {
        need(16);
        u128 v = 0;
        for (int i = 0; i < 16; ++i) v |= static_cast<u128>(in[pos++]) << (8 * i);
        return v;
    };
    for (auto& a : sk.h.a) a = get128();
    sk.h.b = get128();
    need(3);
    sk.h.domain_bits = in[pos] | (in[pos + 1] << 8);
    sk.h.range_bits = in[pos + 2];
    pos += 3;
    if (sk.h.range_bits > 40 || (uint64_t{1} << sk.h.range_bits) != S) throw FormatError("bucket count mismatch");
    need(S * 4 * w);
    sk.buckets.resize(S);
    for (auto& t : sk.buckets) {
        for (FieldElem* c : {&t.value, &t.product, &t.square, &t.hash}) {
            *c = f.deserialize(&in[pos]);
            pos += w;
        }
    }
    if (pos != in.size()) throw FormatError("trailing bytes after superposition sketch");
    return sk;
}

uint64_t redundancy(double ln_domain, double delta, double multiplier) {
    double v = multiplier * (ln_domain + std::log(1.0 / delta) + 2.0);
    return std::max<uint64_t>(1, static_cast<uint64_t>(std::ceil(v)));
}

RmrsSketch rmrs_sketch(const PrimeField& f, const SparseSeq& u, const U256& domain_size, unsigned bucket_bits,
                       uint64_t ell, const Stream& stream) {
    if (domain_size > f.modulus()) throw HypothesisViolated("domain size exceeds the field modulus");
    RmrsSketch out;
    unsigned dbits = std::max(1u, (domain_size - U256(1)).bit_length());
    const auto prepared = prepare(f, u, domain_size);
    for (uint64_t i = 0; i < ell; ++i) {
        Stream s = stream.child(Tag::RedundancySlot, i);
        FieldElem alpha = s.nonzero_field_elem(f);
        PairwiseHash h = PairwiseHash::draw(s, dbits, bucket_bits);
        out.slots.push_back(sketch_prepared(f, prepared, domain_size, alpha, h));
    }
    return out;
}

std::vector<MismatchTriple> majority_vote(const std::vector<std::vector<MismatchTriple>>& per_slot) {
    std::map<MismatchTriple, uint64_t> votes;
    for (const auto& slot : per_slot)
        for (const auto& m : slot) ++votes[m];
    std::vector<MismatchTriple> out;
    for (const auto& [m, c] : votes)
        if (2 * c > per_slot.size()) out.push_back(m);
    return out;
}

std::vector<MismatchTriple> rmrs_recover(const PrimeField& f, const RmrsSketch& a, const RmrsSketch& b) {
    if (a.slots.size() != b.slots.size()) throw SketchMismatch("redundancy differs");
    std::vector<std::vector<MismatchTriple>> per;
    for (std::size_t i = 0; i < a.slots.size(); ++i) per.push_back(super_recover(f, a.slots[i], b.slots[i]));
    return majority_vote(per);
}

}  // namespace edsketch
