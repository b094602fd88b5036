#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edsketch/align.hpp"
#include "edsketch/field.hpp"
#include "edsketch/hashing.hpp"
#include "edsketch/randomness.hpp"

namespace edsketch {

// Arithmetic modulo the Mersenne prime 2^61 − 1.
inline constexpr uint64_t kM61 = (uint64_t{1} << 61) - 1;
inline uint64_t m61_reduce(u128 v) {
    uint64_t r = static_cast<uint64_t>(v & kM61) + static_cast<uint64_t>(v >> 61);
    r = (r & kM61) + (r >> 61);
    return r == kM61 ? 0 : r;
}
inline uint64_t m61_mul(uint64_t a, uint64_t b) { return m61_reduce(static_cast<u128>(a) * b); }
inline uint64_t m61_add(uint64_t a, uint64_t b) { return m61_reduce(static_cast<u128>(a) + b); }

uint64_t mulmod64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod64(uint64_t a, uint64_t e, uint64_t m);
bool is_prime_u64(uint64_t n);
// Largest prime ≤ bound (bound ≥ 2).
uint64_t prev_prime(uint64_t bound);

// Karp–Rabin fingerprints modulo the largest prime q ≤ min(n^5, 2^61 − 1)
// at a random evaluation point β. raw(x) = Σ (x_i + 1)·β^i mod q, so that
// raw(uv) = raw(u) + β^|u|·raw(v) and fingerprints combine bottom-up.
class KarpRabin {
public:
    KarpRabin() = default;
    KarpRabin(uint64_t n, Stream& s);

    uint64_t modulus() const { return q_; }
    uint64_t n() const { return n_; }
    uint64_t raw(const SymString& x) const;
    uint64_t combine(uint64_t raw_u, uint64_t len_u, uint64_t raw_v) const {
        return (raw_u + mulmod64(beta_pow(len_u), raw_v, q_)) % q_;
    }
    // Fingerprint value in {1..q}; the empty string maps to 1.
    uint64_t value(uint64_t raw) const { return raw + 1; }
    uint64_t fingerprint(const SymString& x) const { return value(raw(x)); }
    uint64_t beta_pow(uint64_t e) const;

private:
    uint64_t n_ = 0, q_ = 2, beta_ = 1;
    std::vector<uint64_t> pow_;  // β^i for i ≤ n
};

// Throws InputTooLong when |x| > n.
uint64_t kr_fingerprint(const SymString& x, uint64_t n, Stream& s);

// Threshold edit-distance ("gap") fingerprint family.
//  - Cgk: CGK random walk into a length-3n string, coordinates subsampled at
//    rate min(1, c_ted·ln n / t), polynomial hash of the sample (reference).
//  - Gram: multiset hash of the padded g-grams whose content hash falls below
//    rate min(1, c_ted / t); exact string hash at t = 1.
//  - Exact: plain string hash for every t (gap P = t; test stub only).
enum class GapKind : uint8_t { Cgk = 0, Gram = 1, Exact = 2 };

std::string gap_kind_name(GapKind k);
GapKind gap_kind_from_name(const std::string& s);

struct GapConfig {
    GapKind kind = GapKind::Gram;
    double c_ted = 4.0;
    unsigned gram = 8;
};

class GapFingerprinter {
public:
    GapFingerprinter(const GapConfig& cfg, uint64_t n, uint64_t t, Stream s);

    // Value in [0, 2^61 − 1); throws InputTooLong when |x| > n.
    uint64_t value(const SymString& x) const;
    // Nonzero field image of value().
    FieldElem field_value(const PrimeField& f, const SymString& x) const { return f.from_u64(value(x) + 1); }
    double rate() const { return rate_; }
    uint64_t threshold() const { return t_; }

private:
    uint64_t exact(const SymString& x) const;
    uint64_t cgk(const SymString& x) const;
    uint64_t grams(const SymString& x) const;

    GapConfig cfg_;
    uint64_t n_, t_;
    double rate_ = 1.0;
    uint64_t sample_cut_ = ~uint64_t{0};  // sampled iff hash < cut (or rate ≥ 1)
    uint64_t gamma_ = 1;                  // polynomial evaluation point
    uint64_t key1_ = 0, key2_ = 0;
    PairwiseHash coin_;                   // CGK step coins
    std::vector<uint32_t> sampled_steps_; // CGK sampled coordinates
    std::vector<uint64_t> step_weight_;   // γ^s for sampled coordinates
};

struct GapFingerprint {
    FieldElem value;
    uint64_t t = 1;
    double P = 1.0;
};

GapFingerprint ted_fingerprint(const SymString& x, uint64_t t, uint64_t n, Stream& s, const GapConfig& cfg,
                               double P = 1.0, const PrimeField& f = PrimeField::default_field());

}  // namespace edsketch
