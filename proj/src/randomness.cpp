#include "edsketch/randomness.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "edsketch/errors.hpp"

namespace edsketch {

namespace {

struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    }
};

void ensure_sodium() { static SodiumInit init; }

}  // namespace

std::vector<uint8_t> encode_path(const Path& path) {
    // u32 element count, then per element: u8 tag, u64 little-endian index.
    std::vector<uint8_t> out;
    out.reserve(4 + path.size() * 9);
    uint32_t n = static_cast<uint32_t>(path.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(n >> (8 * i)));
    for (const auto& e : path) {
        out.push_back(static_cast<uint8_t>(e.tag));
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(e.index >> (8 * i)));
    }
    return out;
}

Stream::Stream(const Seed& master, Path path) : master_(master), path_(std::move(path)) {
    ensure_sodium();
    auto msg = encode_path(path_);
    crypto_generichash(key_.data(), key_.size(), msg.data(), msg.size(), master_.data(), master_.size());
}

Stream Stream::child(Tag tag, uint64_t index) const {
    Path p = path_;
    p.push_back({tag, index});
    return Stream(master_, std::move(p));
}

void Stream::refill() {
    // 64-bit block counter as the ChaCha20 nonce; each refill yields 256 bytes.
    uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<uint8_t>(block_ >> (8 * i));
    ++block_;
    crypto_stream_chacha20(buf_.data(), buf_.size(), nonce, key_.data());
    pos_ = 0;
}

void Stream::bytes(uint8_t* out, std::size_t n) {
    while (n > 0) {
        if (pos_ == buf_.size()) refill();
        std::size_t take = std::min(n, buf_.size() - pos_);
        std::memcpy(out, buf_.data() + pos_, take);
        pos_ += take;
        out += take;
        n -= take;
    }
}

uint64_t Stream::next_u64() {
    uint8_t b[8];
    bytes(b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

u128 Stream::next_u128() {
    u128 lo = next_u64();
    u128 hi = next_u64();
    return (hi << 64) | lo;
}

U256 Stream::next_u256() {
    U256 r;
    for (auto& l : r.limb) l = next_u64();
    return r;
}

uint64_t Stream::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Stream::below: bound must be positive");
    uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
    for (;;) {
        uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

double Stream::uniform() { return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0); }

FieldElem Stream::field_elem(const PrimeField& f) { return f.from_u256(next_u256()); }

FieldElem Stream::nonzero_field_elem(const PrimeField& f) {
    for (;;) {
        FieldElem a = field_elem(f);
        if (!f.is_zero(a)) return a;
    }
}

Stream derive_stream(const Seed& master, const Path& path) { return Stream(master, path); }

Seed seed_from_hex(const std::string& hex) {
    if (hex.size() != 64) throw FormatError("seed must be 64 hex characters (32 bytes)");
    Seed s{};
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = nib(hex[2 * i]), lo = nib(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw FormatError("seed contains a non-hex character");
        s[i] = static_cast<uint8_t>(hi * 16 + lo);
    }
    return s;
}

std::string seed_to_hex(const Seed& s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (uint8_t b : s) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

}  // namespace edsketch
