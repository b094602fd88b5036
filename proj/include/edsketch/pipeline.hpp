#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edsketch/align.hpp"
#include "edsketch/decomp.hpp"
#include "edsketch/field.hpp"
#include "edsketch/fingerprint.hpp"
#include "edsketch/hmr.hpp"
#include "edsketch/randomness.hpp"

namespace edsketch {

// Calibration profile: the measured (or analytic) constants from which the
// per-level thresholds, sparsities and capacities are derived.
struct Profile {
    std::string name = "desk";
    double c_split = 12.0;         // ĉ_split: incompatible-split rate ≈ ĉ_split·ED/k'
    double c_eh = 0.5;             // ĉ_EH: |rules Δ| ≤ ĉ_EH·log²n·ED
    double polylog = 1.0;          // stands in for log^6 n in the capacity constraints
    double redundancy_multiplier = 0.05;
    uint32_t rho = 7;              // repetitions
    GapConfig gap{GapKind::Gram, 0.05, 8};
    DecompConfig decomp{};
};

Profile desk_profile();
// Exact constants: ĉ_split = log⁴n, polylog = log⁶n, redundancy multiplier 8.
Profile paper_profile(uint64_t n);
Profile profile_by_name(const std::string& name, uint64_t n);

struct Params {
    uint64_t n = 0, k = 0;
    unsigned s = 0, d = 0;
    double P = 1.0;
    std::string profile;
    std::vector<uint64_t> t;           // t_0 .. t_d
    std::vector<unsigned> k_bits;      // log2 k_0 .. log2 k_d
    std::vector<unsigned> kappa_bits;  // log2 κ_0 .. log2 κ_d
    double c_split = 0, c_eh = 0, c_load = 0, polylog = 1;
    double redundancy_multiplier = 1;
    uint32_t rho = 1;
    GapConfig gap;
    DecompConfig decomp;
    U256 p;
    unsigned u_bits = kRuleIdBits;
    uint32_t R_gram = 0, R_loc = 0;
    double delta = 0;
    bool trivial = false;  // k ≥ n/(40P): the sketch is x itself

    uint64_t sparsity(unsigned level) const;
    // λ^{≤j}: capacities of the depth-j location tree.
    std::vector<unsigned> location_capacity_bits(unsigned j) const;
    friend bool operator==(const Params&, const Params&);
};

// Unchecked evaluation of the parameter formulas (for inspecting the paper
// profile at sizes where no field is large enough).
Params params_formula(uint64_t k, uint64_t n, double P, const Profile& profile);
// Throws ConstraintViolated naming the failed inequality, or FieldTooSmall.
Params derive_params(uint64_t k, uint64_t n, double P, const Profile& profile,
                     const PrimeField& f = PrimeField::default_field());

// HMR parameters of every grammar level (1..d) and location level (0..ds−1).
struct Layout {
    std::vector<HmrParams> grammar;   // index j−1 for level j
    std::vector<HmrParams> location;  // index j
};
Layout make_layout(const Params& params, const PrimeField& f = PrimeField::default_field());

// One node of the decomposition tree T(W^d); the address holds `level`
// digits of s bits, most significant first.
struct TreeNode {
    unsigned level = 0;
    U256 addr;
    uint64_t start = 0;
    SymString text;
    Grammar grammar;   // empty at the root
    FieldElem print;   // gap fingerprint (watermark), unused at the root
};

// One node of the binary refinement T({0,1}^{ds}).
struct BinNode {
    uint64_t len = 0;
    uint64_t kr_raw = 0;
    uint64_t left_size = 0;
};

struct DecompBundle {
    std::vector<std::vector<TreeNode>> levels;      // levels[j] = visible nodes of W^j, sorted
    std::vector<std::map<U256, BinNode>> binary;   // binary[b] = visible nodes of {0,1}^b
    DecompStats stats;
    uint64_t rule_count(unsigned level) const;
};

Stream repetition_stream(const Seed& seed, uint64_t rep);
Stream node_stream(const Stream& rep, unsigned level, const U256& addr, unsigned s);

DecompBundle main_decomp(const SymString& x, const Params& params, const Stream& rep,
                         const PrimeField& f = PrimeField::default_field());
std::vector<HmrSketch> grammar_condense(const DecompBundle& b, const Params& params, const Layout& layout,
                                        const Stream& rep, const PrimeField& f = PrimeField::default_field());
std::vector<HmrSketch> location_condense(const DecompBundle& b, const Params& params, const Layout& layout,
                                         const Stream& rep, const PrimeField& f = PrimeField::default_field());

struct MainSketch {
    std::vector<HmrSketch> str;  // levels 1..d
    std::vector<HmrSketch> loc;  // binary levels 0..ds−1
};

struct EdSketch {
    Params params;
    Seed seed{};
    FieldElem top;
    std::vector<MainSketch> reps;
    SymString verbatim;  // trivial sketches only
};

EdSketch ed_sketch(const SymString& x, uint64_t k, uint64_t n, double P, const Seed& seed,
                   const Profile& profile = desk_profile(), const PrimeField& f = PrimeField::default_field());
EdSketch ed_sketch(const SymString& x, const Params& params, const Seed& seed,
                   const PrimeField& f = PrimeField::default_field());

struct FoundStrings {
    // (level, address) → recovered substrings of x and y.
    std::map<std::pair<unsigned, U256>, std::pair<SymString, SymString>> nodes;
};
FoundStrings find_strings(const std::vector<HmrSketch>& sx, const std::vector<HmrSketch>& sy, const Params& params,
                          const PrimeField& f = PrimeField::default_field());

struct FoundStarts {
    std::map<std::pair<unsigned, U256>, std::pair<uint64_t, uint64_t>> nodes;
};
FoundStarts find_locations(const std::vector<HmrSketch>& lx, const std::vector<HmrSketch>& ly,
                           const FoundStrings& strs, const Params& params,
                           const PrimeField& f = PrimeField::default_field());

EdgeSet main_reconstruct(const MainSketch& a, const MainSketch& b, const Params& params,
                         const PrimeField& f = PrimeField::default_field());

struct EdResult {
    bool large = false;
    std::string large_reason;  // "top-fingerprint" or "too-many-edges"
    uint64_t distance = 0;
    EdgeSet edges;
    bool slice_discipline = true;
};

// Throws IncompatibleSketch when the headers or seeds differ.
EdResult ed_recover(const EdSketch& a, const EdSketch& b, const PrimeField& f = PrimeField::default_field());

// EDSK binary format.
std::vector<uint8_t> serialize_sketch(const EdSketch& sk, Encoding enc = Encoding::Sparse,
                                      const PrimeField& f = PrimeField::default_field());
EdSketch deserialize_sketch(const std::vector<uint8_t>& bytes, const PrimeField& f = PrimeField::default_field());
// Byte length of the dense serialization, computed from Params alone.
uint64_t dense_sketch_size(const Params& params, const PrimeField& f = PrimeField::default_field());

// Smallest power of two ≥ a (a > 0).
uint64_t ceil_pow2(double a);

}  // namespace edsketch
