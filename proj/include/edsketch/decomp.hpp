#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edsketch/align.hpp"
#include "edsketch/hashing.hpp"
#include "edsketch/randomness.hpp"

namespace edsketch {

// Rule identifiers are 122-bit integers laid out as
//   kind (2 bits) | name (40) | arg1 (40) | arg2 (40)
// so a set of identifiers is self-describing: the decoder needs no table.
// A reference field holds either a literal (bit 39 set, symbol in the low
// 32 bits) or the 39-bit name of another rule.
using RuleId = u128;

enum class RuleKind : uint8_t { Pair = 0, Run = 1, Start = 2 };

inline constexpr unsigned kRuleIdBits = 122;
inline constexpr uint64_t kRefMask = (uint64_t{1} << 40) - 1;
inline constexpr uint64_t kLiteralFlag = uint64_t{1} << 39;
inline constexpr uint64_t kNameMask = kLiteralFlag - 1;

inline RuleId make_rule_id(RuleKind kind, uint64_t name, uint64_t arg1, uint64_t arg2) {
    return (static_cast<u128>(kind) << 120) | (static_cast<u128>(name & kRefMask) << 80) |
           (static_cast<u128>(arg1 & kRefMask) << 40) | static_cast<u128>(arg2 & kRefMask);
}
inline unsigned rule_kind_bits(RuleId id) { return static_cast<unsigned>(id >> 120) & 3u; }
inline uint64_t rule_name(RuleId id) { return static_cast<uint64_t>(id >> 80) & kRefMask; }
inline uint64_t rule_arg1(RuleId id) { return static_cast<uint64_t>(id >> 40) & kRefMask; }
inline uint64_t rule_arg2(RuleId id) { return static_cast<uint64_t>(id) & kRefMask; }

// A grammar is the characteristic set of its rule identifiers (kept sorted).
struct Grammar {
    std::vector<RuleId> rules;
    bool empty() const { return rules.empty(); }
    std::size_t size() const { return rules.size(); }
    friend bool operator==(const Grammar&, const Grammar&) = default;
};

struct Fragment {
    uint64_t index = 0;  // position in W = {0,1}^s, increasing with start
    uint64_t start = 0;  // offset within the decomposed string
    SymString text;
    Grammar grammar;
};

struct DecompStats {
    uint64_t resplits = 0;  // over-long pieces re-split at a doubled rate
    uint64_t chunked = 0;   // pieces cut into fixed chunks as a last resort
    uint64_t salts = 0;     // name-collision re-derivations
    bool trivial_fallback = false;
};

// Only nonempty fragments are stored; absent indices are empty.
struct Decomposition {
    std::vector<Fragment> fragments;
    DecompStats stats;
};

struct DecompConfig {
    double c_frag = 1.0;   // base boundary rate is c_frag/k'
    unsigned window = 2;   // boundary decisions look at this many symbols
};

// Splits x into fragments of length ≤ k' with content-defined boundaries and
// encodes each fragment by a locally consistent grammar with ≤ k' rules.
// Throws InputTooLong when |x| > n.
Decomposition basic_decomp(const SymString& x, uint64_t n, uint64_t kprime, const Stream& stream,
                           const DecompConfig& cfg = {});

// Expands the unique start rule; nullopt (UNDEFINED) when the start rule is
// missing or duplicated, a reference is missing, names collide, a cycle is
// found, a rule is unreachable, or the expansion exceeds n symbols.
std::optional<SymString> basic_decode(const Grammar& g, uint64_t n);

// Grammar of a single fragment (exposed for tests).
Grammar parse_fragment(const SymString& z, const Stream& stream, DecompStats* stats = nullptr);

// One rule per line: "ID kind args", sorted by ID (hex identifiers).
std::string grammar_dump(const Grammar& g);

std::string u128_hex(u128 v);

}  // namespace edsketch
