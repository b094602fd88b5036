#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edsketch/uint256.hpp"

namespace edsketch {

// An element of F_p in Montgomery representation. Only meaningful together
// with the PrimeField that produced it; equality of representations is
// equality of field elements because representatives are kept in [0, p).
struct FieldElem {
    U256 mont;
    friend bool operator==(const FieldElem&, const FieldElem&) = default;
};

struct FieldElemHash {
    std::size_t operator()(const FieldElem& a) const noexcept { return U256Hash{}(a.mont); }
};

// Prime field F_p for an odd prime p < 2^256, using 4-limb Montgomery
// multiplication (R = 2^256). The default field is p = 2^255 - 19; for that
// modulus R = 1 and products are reduced by folding 2^256 ≡ 38, which is
// several times faster.
class PrimeField {
public:
    explicit PrimeField(const U256& modulus);

    static const PrimeField& default_field();
    static U256 default_modulus();

    const U256& modulus() const { return p_; }
    unsigned bits() const { return bits_; }
    // Serialized width of one element: ceil(bits(p) / 8) bytes.
    unsigned byte_width() const { return (bits_ + 7) / 8; }

    FieldElem zero() const { return FieldElem{}; }
    FieldElem one() const { return FieldElem{one_}; }

    // Any 256-bit integer is accepted and reduced modulo p.
    FieldElem from_u256(const U256& x) const {
        if (p25519_) {
            U256 r = x;
            while (r >= p_) U256::sub_from(r, p_);
            return FieldElem{r};
        }
        return FieldElem{mont_mul(x, r2_)};
    }
    FieldElem from_u64(uint64_t x) const { return from_u256(U256(x)); }
    U256 to_u256(const FieldElem& a) const { return p25519_ ? a.mont : mont_mul(a.mont, U256(1)); }

    bool is_zero(const FieldElem& a) const { return a.mont.is_zero(); }

    FieldElem add(const FieldElem& a, const FieldElem& b) const;
    FieldElem sub(const FieldElem& a, const FieldElem& b) const;
    FieldElem neg(const FieldElem& a) const { return sub(zero(), a); }
    FieldElem mul(const FieldElem& a, const FieldElem& b) const { return FieldElem{mont_mul(a.mont, b.mont)}; }
    FieldElem sqr(const FieldElem& a) const { return mul(a, a); }
    FieldElem pow(const FieldElem& a, const U256& e) const;
    // Throws ZeroInverse for a = 0.
    FieldElem inv(const FieldElem& a) const;
    FieldElem div(const FieldElem& a, const FieldElem& b) const { return mul(a, inv(b)); }

    void serialize(const FieldElem& a, uint8_t* out) const;
    void serialize(const FieldElem& a, std::vector<uint8_t>& out) const;
    // Throws FormatError when the encoded integer is not below p.
    FieldElem deserialize(const uint8_t* in) const;

    std::string to_dec(const FieldElem& a) const { return to_u256(a).to_dec(); }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

private:
    U256 mont_mul(const U256& a, const U256& b) const;
    U256 mul_25519(const U256& a, const U256& b) const;

    U256 p_;
    U256 r2_;    // R^2 mod p
    U256 one_;   // R mod p
    uint64_t minv_ = 0;  // -p^{-1} mod 2^64
    unsigned bits_ = 0;
    bool p25519_ = false;
};

// Free-function spellings of the two exponentiation primitives.
inline FieldElem fe_inv(const PrimeField& f, const FieldElem& a) { return f.inv(a); }
inline FieldElem fe_pow(const PrimeField& f, const FieldElem& a, const U256& e) { return f.pow(a, e); }

// Inverts every element with one field inversion (Montgomery's trick).
// Throws ZeroInverse if any element is zero.
std::vector<FieldElem> batch_inverse(const PrimeField& f, const std::vector<FieldElem>& xs);

// Fixed-base exponentiation with 4-bit windows: precomputes base^(j * 16^w)
// so that base^e costs one multiplication per nonzero nibble of e.
class FixedBasePow {
public:
    FixedBasePow() = default;
    FixedBasePow(const PrimeField& f, const FieldElem& base, unsigned max_exp_bits = 256);
    FieldElem pow(const U256& e) const;
    unsigned max_exp_bits() const { return windows_ * 4; }

private:
    const PrimeField* f_ = nullptr;
    FieldElem base_;
    unsigned windows_ = 0;
    std::vector<FieldElem> table_;  // windows_ * 15 entries
};

}  // namespace edsketch
