#pragma once

#include <array>
#include <cstdint>

#include "edsketch/randomness.hpp"
#include "edsketch/uint256.hpp"

namespace edsketch {

// Pairwise-independent multiply-add-shift family (Dietzfelbinger):
//   h(x) = ((a·x + b) mod 2^128) >> (128 − range_bits)
// with a odd. Keys wider than 64 bits are split into 64-bit words x_0..x_3
// and hashed as ((Σ a_i·x_i + b) mod 2^128) >> (128 − range_bits), which is
// the vector form of the same strongly universal family.
struct PairwiseHash {
    std::array<u128, 4> a{1, 1, 1, 1};
    u128 b = 0;
    unsigned domain_bits = 64;  // 1..256
    unsigned range_bits = 0;    // 0..64

    static PairwiseHash draw(Stream& s, unsigned domain_bits, unsigned range_bits);

    // Evaluation without the domain check, for hot loops whose keys are
    // known to be in range.
    uint64_t eval(uint64_t x) const {
        if (range_bits == 0) return 0;
        return static_cast<uint64_t>((a[0] * x + b) >> (128 - range_bits));
    }
    uint64_t eval(const U256& x) const;
};

// Checked evaluation; throws DomainOverflow when x ≥ 2^domain_bits.
uint64_t pairwise_eval(const PairwiseHash& h, const U256& x);
uint64_t pairwise_eval(const PairwiseHash& h, uint64_t x);

// 64-bit finalizer (splitmix64) for non-cryptographic table hashing.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace edsketch
