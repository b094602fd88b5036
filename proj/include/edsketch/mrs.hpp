#pragma once

#include <cstdint>
#include <vector>

#include "edsketch/field.hpp"
#include "edsketch/hashing.hpp"
#include "edsketch/randomness.hpp"
#include "edsketch/uint256.hpp"

namespace edsketch {

// (value, product, square, hash) = (u_i, i·u_i, u_i², α^i·u_i) and sums thereof.
struct TraceVector {
    FieldElem value, product, square, hash;
    friend bool operator==(const TraceVector&, const TraceVector&) = default;
};

TraceVector trace(const PrimeField& f, const U256& i, const FieldElem& u, const FieldElem& alpha);
// Variant with α^i supplied by the caller.
TraceVector trace_with_power(const PrimeField& f, const U256& i, const FieldElem& u, const FieldElem& alpha_pow_i);
TraceVector tv_add(const PrimeField& f, const TraceVector& a, const TraceVector& b);
TraceVector tv_sub(const PrimeField& f, const TraceVector& a, const TraceVector& b);
bool tv_is_zero(const PrimeField& f, const TraceVector& t);

struct MismatchTriple {
    U256 index;
    FieldElem x_val, y_val;
    friend bool operator==(const MismatchTriple&, const MismatchTriple&) = default;
    friend bool operator<(const MismatchTriple& a, const MismatchTriple& b) {
        if (a.index != b.index) return a.index < b.index;
        if (a.x_val.mont != b.x_val.mont) return a.x_val.mont < b.x_val.mont;
        return a.y_val.mont < b.y_val.mont;
    }
};

// index = product/value, x = (square + value²)/(2·value), y = (square − value²)/(2·value).
// Throws ZeroValue when t.value = 0.
MismatchTriple restore(const PrimeField& f, const TraceVector& t);
// As restore, with 1/value supplied by the caller (e.g. from batch_inverse).
MismatchTriple restore_with_inverse(const PrimeField& f, const TraceVector& t, const FieldElem& inv_value);

// A sparse D-sequence: (index, value) pairs with distinct indices.
using SparseSeq = std::vector<std::pair<U256, FieldElem>>;

// Superposition sketch induced by (α, h) with |S| = 2^h.range_bits buckets.
struct SuperSketch {
    U256 domain_size;  // |D|
    FieldElem alpha;
    PairwiseHash h;
    std::vector<TraceVector> buckets;
};

// Throws IndexOverflow for indices ≥ |D| and HypothesisViolated when |D| > p.
SuperSketch super_sketch(const PrimeField& f, const SparseSeq& u, const U256& domain_size, const FieldElem& alpha,
                         const PairwiseHash& h);
// Throws SketchMismatch when the sketches were built with different (α, h, |D|).
std::vector<MismatchTriple> super_recover(const PrimeField& f, const SuperSketch& sk_u, const SuperSketch& sk_w);

// Serialization: |D| (32-byte big-endian), |S| (u64), α, hash seed, then
// |S|·4 field elements in bucket order.
std::vector<uint8_t> serialize(const PrimeField& f, const SuperSketch& sk);
SuperSketch deserialize_super_sketch(const PrimeField& f, const std::vector<uint8_t>& bytes);

// Redundancy-ℓ wrapper: ℓ independent (α_i, h_i) drawn from stream paths
// (redundancy-slot, i); recovery keeps triples seen in more than ℓ/2 slots.
struct RmrsSketch {
    std::vector<SuperSketch> slots;
};

// ℓ = ⌈multiplier·(ln|D| + ln(1/δ) + 2)⌉ (multiplier 8 is the strict value).
uint64_t redundancy(double ln_domain, double delta, double multiplier);

RmrsSketch rmrs_sketch(const PrimeField& f, const SparseSeq& u, const U256& domain_size, unsigned bucket_bits,
                       uint64_t ell, const Stream& stream);
std::vector<MismatchTriple> rmrs_recover(const PrimeField& f, const RmrsSketch& a, const RmrsSketch& b);

// Strict-majority vote over per-slot triple lists (each list free of duplicates).
std::vector<MismatchTriple> majority_vote(const std::vector<std::vector<MismatchTriple>>& per_slot);

}  // namespace edsketch
