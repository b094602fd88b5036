#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "edsketch/field.hpp"
#include "edsketch/hashing.hpp"
#include "edsketch/mrs.hpp"
#include "edsketch/randomness.hpp"
#include "edsketch/uint256.hpp"

namespace edsketch {

// Level-uniform tree T(L_1 × ... × L_d) with |L_j| = 2^level_bits[j-1].
// Leaves are flattened mixed-radix with the level-1 label most significant.
struct TreeShape {
    std::vector<unsigned> level_bits;

    unsigned depth() const { return static_cast<unsigned>(level_bits.size()); }
    unsigned total_bits() const;
    // Label of `leaf` at level i (1-based).
    U256 label(const U256& leaf, unsigned level) const;
    // Address of the depth-i ancestor of `leaf` (its first i labels).
    U256 prefix(const U256& leaf, unsigned depth) const;
    friend bool operator==(const TreeShape&, const TreeShape&) = default;
};

struct HmrParams {
    TreeShape shape;
    std::vector<unsigned> kappa_bits;  // log2 κ_0 .. log2 κ_d
    uint32_t R = 1;
    double delta = 1e-3;
    uint64_t ell = 1;
    friend bool operator==(const HmrParams&, const HmrParams&) = default;
};

struct HmrConfig {
    double redundancy_multiplier = 8.0;
    bool strict_field_check = false;  // also require p ≥ 4·∏|L_j|²
};

// Validates the hypotheses (capacities non-increasing powers of two, field
// large enough) and fills in ℓ. Throws HypothesisViolated naming the check.
HmrParams make_hmr_params(const PrimeField& f, TreeShape shape, std::vector<unsigned> kappa_bits, uint32_t R,
                          double delta, const HmrConfig& cfg = {});

// r_j : L_{j+1} × [κ_{j+1}] → [κ_j] for j = 0..d-1.
struct Routing {
    std::vector<PairwiseHash> r;
};

Routing draw_routing(const HmrParams& p, const Stream& slot_stream);
// Buckets are 0-based: i_d = 0, i_j = r_j(leaf_{j+1}, i_{j+1}).
uint64_t leaf_to_root(const HmrParams& p, const Routing& routing, const U256& leaf);

struct HmrSlot {
    FieldElem alpha;
    std::vector<std::pair<uint64_t, TraceVector>> buckets;  // nonzero root buckets, sorted
};

struct HmrSketch {
    HmrParams params;
    std::vector<uint8_t> path;  // encoded derivation path of the sketch's stream
    std::vector<HmrSlot> slots;
    FieldElem value;            // depth-0 trees: the single datum itself
};

HmrSketch hmr_sketch(const PrimeField& f, const SparseSeq& u, const HmrParams& params, const Stream& stream);
// Throws SketchMismatch when the headers differ.
std::vector<MismatchTriple> hmr_recover(const PrimeField& f, const HmrSketch& a, const HmrSketch& b);

enum class Encoding : uint8_t { Dense = 0, Sparse = 1 };

void hmr_serialize(const PrimeField& f, const HmrSketch& sk, Encoding enc, std::vector<uint8_t>& out);
// Parses one sketch starting at `pos`, advancing it.
HmrSketch hmr_deserialize(const PrimeField& f, const std::vector<uint8_t>& in, std::size_t& pos);
// Byte length of the dense serialization (computed without materializing it).
uint64_t hmr_dense_size(const PrimeField& f, const HmrParams& params, std::size_t path_bytes);

// Brute-force load labeling: leaf load 1 per mismatch, internal load
// min(κ_i, Σ child loads); a leaf is accessible iff the root and all its
// strict ancestors have load·R < κ.
struct LoadReport {
    std::map<std::pair<unsigned, U256>, uint64_t> load;  // (depth, prefix) → load
    std::set<U256> accessible;
};

LoadReport hmr_load_oracle(const std::set<U256>& mismatch_leaves, const TreeShape& shape,
                           const std::vector<unsigned>& kappa_bits, uint32_t R);

}  // namespace edsketch
