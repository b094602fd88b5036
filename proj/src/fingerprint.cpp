#include "edsketch/fingerprint.hpp"

#include <cmath>

#include "edsketch/errors.hpp"

namespace edsketch {

uint64_t mulmod64(uint64_t a, uint64_t b, uint64_t m) { return static_cast<uint64_t>(static_cast<u128>(a) * b % m); }

uint64_t powmod64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) d >>= 1, ++r;
    // Deterministic witness set for 64-bit integers.
    for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

uint64_t prev_prime(uint64_t bound) {
    for (uint64_t c = bound; c >= 2; --c)
        if (is_prime_u64(c)) return c;
    throw DomainOverflow("no prime below bound");
}

namespace {

uint64_t kr_prime_bound(uint64_t n) {
    // min(n^5, 2^61 − 1) without overflow.
    u128 v = 1;
    for (int i = 0; i < 5; ++i) {
        v *= std::max<uint64_t>(n, 2);
        if (v >= kM61) return kM61;
    }
    return static_cast<uint64_t>(v);
}

}  // namespace

KarpRabin::KarpRabin(uint64_t n, Stream& s) : n_(n) {
    q_ = prev_prime(kr_prime_bound(n));
    beta_ = 1 + s.below(q_ - 1);
    pow_.resize(n + 1);
    pow_[0] = 1;
    for (uint64_t i = 1; i <= n; ++i) pow_[i] = mulmod64(pow_[i - 1], beta_, q_);
}

uint64_t KarpRabin::beta_pow(uint64_t e) const { return e < pow_.size() ? pow_[e] : powmod64(beta_, e, q_); }

uint64_t KarpRabin::raw(const SymString& x) const {
    uint64_t h = 0;
    for (std::size_t i = x.size(); i-- > 0;) h = (mulmod64(h, beta_, q_) + (static_cast<uint64_t>(x[i]) + 1) % q_) % q_;
    return h;
}

uint64_t kr_fingerprint(const SymString& x, uint64_t n, Stream& s) {
    if (x.size() > n) throw InputTooLong("string of length " + std::to_string(x.size()) + " exceeds n");
    KarpRabin kr(n, s);
    return kr.fingerprint(x);
}

std::string gap_kind_name(GapKind k) {
    switch (k) {
        case GapKind::Cgk: return "cgk";
        case GapKind::Gram: return "gram";
        case GapKind::Exact: return "exact";
    }
    return "?";
}

GapKind gap_kind_from_name(const std::string& s) {
    if (s == "cgk") return GapKind::Cgk;
    if (s == "gram") return GapKind::Gram;
    if (s == "exact") return GapKind::Exact;
    throw FormatError("unknown gap fingerprint kind '" + s + "'");
}

GapFingerprinter::GapFingerprinter(const GapConfig& cfg, uint64_t n, uint64_t t, Stream s)
    : cfg_(cfg), n_(n), t_(std::max<uint64_t>(t, 1)) {
    gamma_ = 1 + s.below(kM61 - 1);
    key1_ = s.next_u64();
    key2_ = s.next_u64();
    if (cfg_.kind == GapKind::Cgk) {
        double ln_n = std::log(static_cast<double>(std::max<uint64_t>(n, 2)));
        rate_ = std::min(1.0, cfg_.c_ted * ln_n / static_cast<double>(t_));
        coin_ = PairwiseHash::draw(s, 64, 1);
        // Bernoulli(rate) sampling of the 3n output coordinates.
        uint64_t cut = rate_ >= 1.0 ? ~uint64_t{0} : static_cast<uint64_t>(std::ldexp(rate_, 64));
        uint64_t w = 1;
        for (uint64_t step = 0; step < 3 * n; ++step) {
            if (rate_ >= 1.0 || s.next_u64() < cut) {
                sampled_steps_.push_back(static_cast<uint32_t>(step));
                step_weight_.push_back(w);
            }
            w = m61_mul(w, gamma_);
        }
    } else if (cfg_.kind == GapKind::Gram) {
        rate_ = std::min(1.0, cfg_.c_ted / static_cast<double>(t_));
        sample_cut_ = rate_ >= 1.0 ? ~uint64_t{0} : static_cast<uint64_t>(std::ldexp(rate_, 64));
    }
}

uint64_t GapFingerprinter::value(const SymString& x) const {
    if (x.size() > n_) throw InputTooLong("string of length " + std::to_string(x.size()) + " exceeds n");
    switch (cfg_.kind) {
        case GapKind::Exact: return exact(x);
        case GapKind::Cgk: return cgk(x);
        case GapKind::Gram: return t_ == 1 ? exact(x) : grams(x);
    }
    return 0;
}

uint64_t GapFingerprinter::exact(const SymString& x) const {
    // Length-tagged polynomial hash; symbols are shifted by one so that no
    // symbol encodes as zero.
    uint64_t h = m61_add(x.size(), key1_ % kM61);
    for (Symbol c : x) h = m61_add(m61_mul(h, gamma_), static_cast<uint64_t>(c) + 1);
    return h;
}

uint64_t GapFingerprinter::cgk(const SymString& x) const {
    // Walk: at step s emit x[i] (or ⊥ past the end, code 0) and advance i by
    // the coin r_s(x[i]). Only sampled steps contribute to the hash.
    uint64_t h = 0;
    std::size_t i = 0, next = 0;
    const std::size_t total = 3 * n_;
    for (std::size_t step = 0; step < total && next < sampled_steps_.size(); ++step) {
        Symbol c = i < x.size() ? x[i] : 0;
        if (sampled_steps_[next] == step) {
            uint64_t code = i < x.size() ? static_cast<uint64_t>(c) + 1 : 0;
            h = m61_add(h, m61_mul(code, step_weight_[next]));
            ++next;
        }
        if (i < x.size()) i += coin_.eval((static_cast<uint64_t>(step) << 32) | c);
        else break;  // ⊥ contributes nothing from here on
    }
    return h;
}

uint64_t GapFingerprinter::grams(const SymString& x) const {
    // Padded g-grams: g−1 sentinels (code 0) on both sides. Each gram is
    // identified by a polynomial hash of its codes; content sampling keeps
    // the decision identical for equal grams in both strings.
    const unsigned g = std::max(1u, cfg_.gram);
    const std::size_t len = x.size() + 2 * (g - 1);
    auto code = [&](std::size_t p) -> uint64_t {
        if (p < g - 1 || p >= g - 1 + x.size()) return 0;
        return static_cast<uint64_t>(x[p - (g - 1)]) + 1;
    };
    uint64_t top = 1;  // γ^(g−1)
    for (unsigned i = 1; i < g; ++i) top = m61_mul(top, gamma_);
    uint64_t h = 0, acc = 0;
    for (std::size_t p = 0; p < len; ++p) {
        if (p >= g) h = m61_reduce(static_cast<u128>(h) + kM61 - m61_mul(code(p - g), top));
        h = m61_add(m61_mul(h, gamma_), code(p));
        if (p + 1 < g) continue;
        uint64_t id = mix64(h ^ key1_);
        if (rate_ >= 1.0 || id < sample_cut_) acc = m61_add(acc, mix64(h ^ key2_) % kM61);
    }
    return acc;
}

GapFingerprint ted_fingerprint(const SymString& x, uint64_t t, uint64_t n, Stream& s, const GapConfig& cfg, double P,
                               const PrimeField& f) {
    GapFingerprinter fp(cfg, n, t, s);
    return {fp.field_value(f, x), t, P};
}

}  // namespace edsketch
