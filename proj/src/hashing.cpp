#include "edsketch/hashing.hpp"

#include "edsketch/errors.hpp"

namespace edsketch {

PairwiseHash PairwiseHash::draw(Stream& s, unsigned domain_bits, unsigned range_bits) {
    if (domain_bits == 0 || domain_bits > 256) throw DomainOverflow("pairwise hash domain must be 1..256 bits");
    if (range_bits > 64) throw DomainOverflow("pairwise hash range must be at most 64 bits");
    PairwiseHash h;
    h.domain_bits = domain_bits;
    h.range_bits = range_bits;
    for (auto& ai : h.a) ai = s.next_u128() | 1;
    h.b = s.next_u128();
    return h;
}

uint64_t PairwiseHash::eval(const U256& x) const {
    if (range_bits == 0) return 0;
    u128 acc = b;
    for (int i = 0; i < 4; ++i) acc += a[i] * x.limb[i];
    return static_cast<uint64_t>(acc >> (128 - range_bits));
}

uint64_t pairwise_eval(const PairwiseHash& h, const U256& x) {
    if (x.bit_length() > h.domain_bits) throw DomainOverflow("key " + x.to_dec() + " outside hash domain");
    return h.eval(x);
}

uint64_t pairwise_eval(const PairwiseHash& h, uint64_t x) { return pairwise_eval(h, U256(x)); }

}  // namespace edsketch
