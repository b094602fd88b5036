#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>

namespace edsketch {

using u128 = unsigned __int128;

// Fixed-width 256-bit unsigned integer, four little-endian 64-bit limbs.
// Used for field moduli, exponents and flattened leaf indices.
struct U256 {
    std::array<uint64_t, 4> limb{0, 0, 0, 0};

    constexpr U256() = default;
    constexpr U256(uint64_t v) : limb{v, 0, 0, 0} {}  // NOLINT(implicit)
    static constexpr U256 from_u128(u128 v) {
        U256 r;
        r.limb[0] = static_cast<uint64_t>(v);
        r.limb[1] = static_cast<uint64_t>(v >> 64);
        return r;
    }

    constexpr bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
    constexpr uint64_t low64() const { return limb[0]; }
    constexpr u128 low128() const { return (static_cast<u128>(limb[1]) << 64) | limb[0]; }
    constexpr bool fits_u128() const { return limb[2] == 0 && limb[3] == 0; }
    constexpr bool fits_u64() const { return limb[1] == 0 && limb[2] == 0 && limb[3] == 0; }

    constexpr bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1U; }
    constexpr void set_bit(unsigned i) { limb[i / 64] |= uint64_t{1} << (i % 64); }

    constexpr unsigned bit_length() const {
        for (int i = 3; i >= 0; --i) {
            if (limb[i] != 0) return static_cast<unsigned>(i) * 64 + 64 - __builtin_clzll(limb[i]);
        }
        return 0;
    }

    friend constexpr bool operator==(const U256& a, const U256& b) { return a.limb == b.limb; }
    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
        }
        return std::strong_ordering::equal;
    }

    // Returns the carry out of the top limb.
    static constexpr uint64_t add_to(U256& a, const U256& b) {
#if defined(__x86_64__)
        if (!std::is_constant_evaluated()) {
            unsigned char c = 0;
            unsigned long long r;
            for (int i = 0; i < 4; ++i) {
                c = __builtin_ia32_addcarryx_u64(c, a.limb[i], b.limb[i], &r);
                a.limb[i] = r;
            }
            return c;
        }
#endif
        u128 c = 0;
        for (int i = 0; i < 4; ++i) {
            c += static_cast<u128>(a.limb[i]) + b.limb[i];
            a.limb[i] = static_cast<uint64_t>(c);
            c >>= 64;
        }
        return static_cast<uint64_t>(c);
    }
    // Returns the borrow out of the top limb.
    static constexpr uint64_t sub_from(U256& a, const U256& b) {
#if defined(__x86_64__)
        if (!std::is_constant_evaluated()) {
            unsigned char c = 0;
            unsigned long long r;
            for (int i = 0; i < 4; ++i) {
                c = __builtin_ia32_sbb_u64(c, a.limb[i], b.limb[i], &r);
                a.limb[i] = r;
            }
            return c;
        }
#endif
        uint64_t borrow = 0;
        for (int i = 0; i < 4; ++i) {
            u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
            a.limb[i] = static_cast<uint64_t>(d);
            borrow = static_cast<uint64_t>(d >> 64) & 1U;
        }
        return borrow;
    }

    friend constexpr U256 operator+(U256 a, const U256& b) { add_to(a, b); return a; }
    friend constexpr U256 operator-(U256 a, const U256& b) { sub_from(a, b); return a; }

    friend constexpr U256 operator<<(const U256& a, unsigned s) {
        U256 r;
        if (s >= 256) return r;
        unsigned w = s / 64, b = s % 64;
        for (int i = 3; i >= 0; --i) {
            int src = i - static_cast<int>(w);
            if (src < 0) continue;
            uint64_t v = a.limb[src] << b;
            if (b != 0 && src >= 1) v |= a.limb[src - 1] >> (64 - b);
            r.limb[i] = v;
        }
        return r;
    }
    friend constexpr U256 operator>>(const U256& a, unsigned s) {
        U256 r;
        if (s >= 256) return r;
        unsigned w = s / 64, b = s % 64;
        for (unsigned i = 0; i < 4; ++i) {
            unsigned src = i + w;
            if (src > 3) break;
            uint64_t v = a.limb[src] >> b;
            if (b != 0 && src + 1 <= 3) v |= a.limb[src + 1] << (64 - b);
            r.limb[i] = v;
        }
        return r;
    }
    friend constexpr U256 operator|(U256 a, const U256& b) {
        for (int i = 0; i < 4; ++i) a.limb[i] |= b.limb[i];
        return a;
    }
    friend constexpr U256 operator&(U256 a, const U256& b) {
        for (int i = 0; i < 4; ++i) a.limb[i] &= b.limb[i];
        return a;
    }

    // a * m + add, returning the overflow limb.
    static constexpr uint64_t mul_add_small(U256& a, uint64_t m, uint64_t add) {
        u128 c = add;
        for (int i = 0; i < 4; ++i) {
            c += static_cast<u128>(a.limb[i]) * m;
            a.limb[i] = static_cast<uint64_t>(c);
            c >>= 64;
        }
        return static_cast<uint64_t>(c);
    }
    // In-place division by a small divisor; returns the remainder.
    static constexpr uint64_t divmod_small(U256& a, uint64_t d) {
        u128 rem = 0;
        for (int i = 3; i >= 0; --i) {
            u128 cur = (rem << 64) | a.limb[i];
            a.limb[i] = static_cast<uint64_t>(cur / d);
            rem = cur % d;
        }
        return static_cast<uint64_t>(rem);
    }

    // Mask of the low `bits` bits.
    static constexpr U256 low_mask(unsigned bits) {
        if (bits >= 256) return ~U256();
        return (U256(1) << bits) - U256(1);
    }
    friend constexpr U256 operator~(U256 a) {
        for (auto& l : a.limb) l = ~l;
        return a;
    }

    std::string to_dec() const {
        if (is_zero()) return "0";
        U256 t = *this;
        std::string s;
        while (!t.is_zero()) s.push_back(static_cast<char>('0' + divmod_small(t, 10)));
        return {s.rbegin(), s.rend()};
    }
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (int i = 3; i >= 0; --i)
            for (int sh = 60; sh >= 0; sh -= 4) s.push_back(digits[(limb[i] >> sh) & 0xF]);
        auto pos = s.find_first_not_of('0');
        return pos == std::string::npos ? "0" : s.substr(pos);
    }

    // Little-endian byte serialization of the low `nbytes` bytes.
    void to_le_bytes(uint8_t* out, std::size_t nbytes) const {
        for (std::size_t i = 0; i < nbytes; ++i) out[i] = static_cast<uint8_t>(limb[i / 8] >> (8 * (i % 8)));
    }
    static U256 from_le_bytes(const uint8_t* in, std::size_t nbytes) {
        U256 r;
        for (std::size_t i = 0; i < nbytes && i < 32; ++i) r.limb[i / 8] |= static_cast<uint64_t>(in[i]) << (8 * (i % 8));
        return r;
    }
};

struct U256Hash {
    std::size_t operator()(const U256& a) const noexcept {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (uint64_t l : a.limb) h = (h ^ l) * 0xff51afd7ed558ccdULL, h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

}  // namespace edsketch
