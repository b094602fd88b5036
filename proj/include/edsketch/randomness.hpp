#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "edsketch/field.hpp"
#include "edsketch/uint256.hpp"

namespace edsketch {

using Seed = std::array<uint8_t, 32>;

// Purpose tags for randomness derivation paths. The first five are the
// tags named by the sketching scheme; the others separate sub-purposes
// inside one repetition so that no two consumers ever share a stream.
enum class Tag : uint8_t {
    Repetition = 1,
    Level = 2,
    RedundancySlot = 3,
    DecompRound = 4,
    Fingerprint = 5,
    NodeDigit = 6,   // one W-digit of a tree-node address
    Purpose = 7,     // sub-purpose discriminator, see Purpose below
    Salt = 8,
};

// Sub-purposes used with Tag::Purpose.
enum class Purpose : uint64_t {
    Grammar = 1,        // grammar HMR sketches
    Location = 2,       // location HMR sketches
    Decomp = 3,         // basic-decomp randomness
    GapPrint = 4,       // threshold fingerprints
    KarpRabin = 5,      // equality fingerprints
    TopPrint = 6,       // top-level threshold fingerprint
    Test = 99,
};

struct PathElem {
    Tag tag;
    uint64_t index;
};

using Path = std::vector<PathElem>;

// Deterministic pseudorandom byte stream for a (master seed, path) label.
// Derivation: key = BLAKE2b-256 keyed by the master seed over the
// length-prefixed path encoding; bytes = ChaCha20 keystream under that key.
class Stream {
public:
    Stream(const Seed& master, Path path);

    // A new stream whose path extends this one by (tag, index).
    Stream child(Tag tag, uint64_t index) const;
    Stream child(Purpose p) const { return child(Tag::Purpose, static_cast<uint64_t>(p)); }

    const Seed& master() const { return master_; }
    const Path& path() const { return path_; }
    const std::array<uint8_t, 32>& key() const { return key_; }

    void bytes(uint8_t* out, std::size_t n);
    uint64_t next_u64();
    u128 next_u128();
    U256 next_u256();
    // Uniform in [0, bound) by rejection; bound > 0.
    uint64_t below(uint64_t bound);
    // Uniform double in [0, 1).
    double uniform();
    FieldElem field_elem(const PrimeField& f);
    FieldElem nonzero_field_elem(const PrimeField& f);

private:
    void refill();

    Seed master_;
    Path path_;
    std::array<uint8_t, 32> key_{};
    uint64_t block_ = 0;
    std::array<uint8_t, 256> buf_{};
    std::size_t pos_ = 256;
};

Stream derive_stream(const Seed& master, const Path& path);

// Prefix-free encoding of a derivation path (exposed for tests).
std::vector<uint8_t> encode_path(const Path& path);

Seed seed_from_hex(const std::string& hex);
std::string seed_to_hex(const Seed& s);

}  // namespace edsketch
