#include "edsketch/field.hpp"

#include "edsketch/errors.hpp"

namespace edsketch {

PrimeField::PrimeField(const U256& modulus) : p_(modulus) {
    if (!p_.bit(0) || p_ <= U256(2)) throw HypothesisViolated("field modulus must be an odd prime > 2");
    bits_ = p_.bit_length();

    // Newton iteration for p^{-1} mod 2^64, then negate.
    uint64_t inv = 1;
    for (int i = 0; i < 7; ++i) inv *= 2 - p_.limb[0] * inv;
    minv_ = ~inv + 1;

    // 2^512 mod p by repeated doubling; keep the intermediate 2^256 mod p.
    U256 x(1);
    for (int i = 0; i < 512; ++i) {
        U256 y = x;
        uint64_t carry = U256::add_to(y, x);
        if (carry != 0 || y >= p_) U256::sub_from(y, p_);
        x = y;
        if (i == 255) one_ = x;
    }
    r2_ = x;
    if (p_ == default_modulus()) {
        p25519_ = true;
        one_ = U256(1);
        r2_ = U256(1);
    }
}

U256 PrimeField::default_modulus() { return (U256(1) << 255) - U256(19); }

const PrimeField& PrimeField::default_field() {
    static const PrimeField f(default_modulus());
    return f;
}

U256 PrimeField::mul_25519(const U256& a, const U256& b) const {
    uint64_t t[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        if (b.limb[i] == 0) continue;  // small operands (indices) are common
        u128 c = 0;
        for (int j = 0; j < 4; ++j) {
            c += static_cast<u128>(a.limb[j]) * b.limb[i] + t[i + j];
            t[i + j] = static_cast<uint64_t>(c);
            c >>= 64;
        }
        t[i + 4] = static_cast<uint64_t>(c);
    }
    // lo + 38·hi, then fold the carry limb the same way.
    U256 r;
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
        c += static_cast<u128>(t[i + 4]) * 38 + t[i];
        r.limb[i] = static_cast<uint64_t>(c);
        c >>= 64;
    }
    while (c != 0) {
        u128 d = c * 38;
        for (int i = 0; i < 4 && d != 0; ++i) {
            d += r.limb[i];
            r.limb[i] = static_cast<uint64_t>(d);
            d >>= 64;
        }
        c = d;
    }
    while (r >= p_) U256::sub_from(r, p_);
    return r;
}

U256 PrimeField::mont_mul(const U256& a, const U256& b) const {
    if (p25519_) return mul_25519(a, b);
    uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        u128 c = 0;
        for (int j = 0; j < 4; ++j) {
            c += static_cast<u128>(a.limb[j]) * b.limb[i] + t[j];
            t[j] = static_cast<uint64_t>(c);
            c >>= 64;
        }
        c += t[4];
        t[4] = static_cast<uint64_t>(c);
        t[5] = static_cast<uint64_t>(c >> 64);

        uint64_t m = t[0] * minv_;
        c = static_cast<u128>(m) * p_.limb[0] + t[0];
        c >>= 64;
        for (int j = 1; j < 4; ++j) {
            c += static_cast<u128>(m) * p_.limb[j] + t[j];
            t[j - 1] = static_cast<uint64_t>(c);
            c >>= 64;
        }
        c += t[4];
        t[3] = static_cast<uint64_t>(c);
        t[4] = t[5] + static_cast<uint64_t>(c >> 64);
    }
    U256 r;
    r.limb = {t[0], t[1], t[2], t[3]};
    if (t[4] != 0 || r >= p_) U256::sub_from(r, p_);
    return r;
}

FieldElem PrimeField::add(const FieldElem& a, const FieldElem& b) const {
    U256 r = a.mont;
    uint64_t carry = U256::add_to(r, b.mont);
    U256 s = r;
    uint64_t borrow = U256::sub_from(s, p_);
    return FieldElem{(carry != 0 || borrow == 0) ? s : r};
}

FieldElem PrimeField::sub(const FieldElem& a, const FieldElem& b) const {
    U256 r = a.mont;
    if (U256::sub_from(r, b.mont) != 0) U256::add_to(r, p_);
    return FieldElem{r};
}

FieldElem PrimeField::pow(const FieldElem& a, const U256& e) const {
    FieldElem r = one();
    for (int i = static_cast<int>(e.bit_length()) - 1; i >= 0; --i) {
        r = sqr(r);
        if (e.bit(static_cast<unsigned>(i))) r = mul(r, a);
    }
    return r;
}

FieldElem PrimeField::inv(const FieldElem& a) const {
    if (is_zero(a)) throw ZeroInverse("inverse of zero");
    return pow(a, p_ - U256(2));
}

void PrimeField::serialize(const FieldElem& a, uint8_t* out) const { to_u256(a).to_le_bytes(out, byte_width()); }

void PrimeField::serialize(const FieldElem& a, std::vector<uint8_t>& out) const {
    std::size_t off = out.size();
    out.resize(off + byte_width());
    serialize(a, out.data() + off);
}

FieldElem PrimeField::deserialize(const uint8_t* in) const {
    U256 v = U256::from_le_bytes(in, byte_width());
    if (v >= p_) throw FormatError("field element not reduced modulo p");
    return from_u256(v);
}

std::vector<FieldElem> batch_inverse(const PrimeField& f, const std::vector<FieldElem>& xs) {
    std::vector<FieldElem> prefix(xs.size());
    FieldElem acc = f.one();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (f.is_zero(xs[i])) throw ZeroInverse("inverse of zero");
        prefix[i] = acc;
        acc = f.mul(acc, xs[i]);
    }
    if (xs.empty()) return {};
    FieldElem inv = f.inv(acc);
    std::vector<FieldElem> out(xs.size());
    for (std::size_t i = xs.size(); i-- > 0;) {
        out[i] = f.mul(inv, prefix[i]);
        inv = f.mul(inv, xs[i]);
    }
    return out;
}

FixedBasePow::FixedBasePow(const PrimeField& f, const FieldElem& base, unsigned max_exp_bits)
    : f_(&f), base_(base), windows_((max_exp_bits + 3) / 4) {
    table_.resize(static_cast<std::size_t>(windows_) * 15);
    FieldElem b = base;  // base^(16^w)
    for (unsigned w = 0; w < windows_; ++w) {
        FieldElem acc = b;
        for (unsigned j = 0; j < 15; ++j) {
            table_[w * 15 + j] = acc;
            acc = f.mul(acc, b);
        }
        b = acc;  // base^(16^(w+1))
    }
}

FieldElem FixedBasePow::pow(const U256& e) const {
    FieldElem r = f_->one();
    bool first = true;
    unsigned nbits = e.bit_length();
    if (nbits > windows_ * 4) return f_->pow(base_, e);
    for (unsigned w = 0; w * 4 < nbits; ++w) {
        unsigned nib = static_cast<unsigned>((e.limb[(w * 4) / 64] >> ((w * 4) % 64)) & 0xF);
        if (nib == 0) continue;
        r = first ? table_[w * 15 + nib - 1] : f_->mul(r, table_[w * 15 + nib - 1]);
        first = false;
    }
    return r;
}

}  // namespace edsketch
