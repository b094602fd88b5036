#include "edsketch/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "edsketch/errors.hpp"

namespace edsketch {

namespace {

constexpr unsigned kMaxRounds = 96;
constexpr unsigned kMaxSalts = 8;

struct U128Hash {
    std::size_t operator()(u128 v) const noexcept {
        return static_cast<std::size_t>(mix64(static_cast<uint64_t>(v) ^ mix64(static_cast<uint64_t>(v >> 64))));
    }
};

uint64_t literal_ref(Symbol c) { return kLiteralFlag | static_cast<uint64_t>(c); }

// Keyed 39-bit content names.
struct Namer {
    uint64_t k0, k1;
    uint64_t operator()(RuleKind kind, uint64_t a1, uint64_t a2) const {
        uint64_t h = mix64(k0 ^ (static_cast<uint64_t>(kind) << 56));
        h = mix64(h ^ a1 ^ k1);
        h = mix64(h ^ a2);
        return h & kNameMask;
    }
};

class NameCollision {};

struct Parser {
    Namer namer;
    Stream round_stream;
    std::vector<PairwiseHash> round_hash;
    std::unordered_map<uint64_t, RuleId> by_name;
    std::vector<RuleId> rules;

    uint64_t emit(RuleKind kind, uint64_t a1, uint64_t a2) {
        uint64_t name = namer(kind, a1, a2);
        RuleId id = make_rule_id(kind, name, a1, a2);
        auto [it, fresh] = by_name.emplace(name, id);
        if (fresh) rules.push_back(id);
        else if (it->second != id) throw NameCollision{};
        return name;
    }

    void parse(const SymString& z) {
        std::vector<uint64_t> seq;
        seq.reserve(z.size());
        for (Symbol c : z) seq.push_back(literal_ref(c));
        unsigned round = 0;
        while (seq.size() > 1) {
            // (1) Maximal runs of equal references become run rules.
            std::vector<uint64_t> runs;
            runs.reserve(seq.size());
            for (std::size_t i = 0; i < seq.size();) {
                std::size_t j = i;
                while (j < seq.size() && seq[j] == seq[i]) ++j;
                runs.push_back(j - i >= 2 ? emit(RuleKind::Run, seq[i], j - i) : seq[i]);
                i = j;
            }
            seq.swap(runs);
            if (seq.size() == 1) break;

            // (2) A strict local minimum of the round hash pairs with its right
            // neighbour (the last position pairs leftwards when free).
            while (round_hash.size() <= round && round_hash.size() < kMaxRounds)
                round_hash.push_back(PairwiseHash::draw(round_stream, 40, 64));
            const auto& h = round_hash[std::min<std::size_t>(round, round_hash.size() - 1)];
            std::vector<uint64_t> hv(seq.size());
            for (std::size_t i = 0; i < seq.size(); ++i) hv[i] = h.eval(seq[i]);
            std::vector<uint8_t> pair_right(seq.size(), 0);
            bool any = false;
            for (std::size_t i = 0; i < seq.size(); ++i) {
                bool left_ok = i == 0 || hv[i] < hv[i - 1];
                bool right_ok = i + 1 == seq.size() || hv[i] < hv[i + 1];
                if (!left_ok || !right_ok) continue;
                if (i + 1 < seq.size()) {
                    pair_right[i] = 1;
                    any = true;
                } else if (i >= 1 && (i < 2 || !pair_right[i - 2])) {
                    pair_right[i - 1] = 1;
                    any = true;
                }
            }
            if (!any) pair_right[0] = 1;
            std::vector<uint64_t> next;
            next.reserve(seq.size());
            for (std::size_t i = 0; i < seq.size(); ++i) {
                if (pair_right[i] && i + 1 < seq.size()) {
                    next.push_back(emit(RuleKind::Pair, seq[i], seq[i + 1]));
                    ++i;
                } else {
                    next.push_back(seq[i]);
                }
            }
            seq.swap(next);
            ++round;
        }
        emit(RuleKind::Start, seq.empty() ? 0 : seq[0], z.size());
    }
};

Grammar parse_with_salt(const SymString& z, const Stream& stream, uint64_t salt) {
    Stream s = stream.child(Tag::Salt, salt);
    Parser p{{s.next_u64(), s.next_u64()}, stream.child(Tag::DecompRound, 0), {}, {}, {}};
    p.parse(z);
    Grammar g;
    g.rules = std::move(p.rules);
    std::sort(g.rules.begin(), g.rules.end());
    return g;
}

}  // namespace

Grammar parse_fragment(const SymString& z, const Stream& stream, DecompStats* stats) {
    if (z.empty()) return {};
    for (uint64_t salt = 0; salt < kMaxSalts; ++salt) {
        try {
            return parse_with_salt(z, stream, salt);
        } catch (const NameCollision&) {
            if (stats) ++stats->salts;
        }
    }
    throw HypothesisViolated("unresolvable rule-name collision");
}

Decomposition basic_decomp(const SymString& x, uint64_t n, uint64_t kprime, const Stream& stream,
                           const DecompConfig& cfg) {
    if (x.size() > n) throw InputTooLong("string of length " + std::to_string(x.size()) + " exceeds n");
    Decomposition d;
    if (x.empty()) return d;
    kprime = std::max<uint64_t>(kprime, 1);

    // Boundary before position p (0 < p < |x|) iff the keyed hash of the
    // window x[p−w+1..p] falls below the current cut; the base rate gives a
    // mean fragment length of k'/c_frag. Over-long pieces are re-split at
    // doubled rates (a superset of the original boundaries), and chunked
    // into k'-blocks only when the rate saturates.
    Stream bs = stream.child(Tag::Purpose, static_cast<uint64_t>(Purpose::Decomp));
    PairwiseHash bh = PairwiseHash::draw(bs, 256, 64);
    const unsigned w = std::clamp(cfg.window, 1u, 8u);
    std::vector<uint64_t> hv(x.size(), 0);
    for (std::size_t p = 1; p < x.size(); ++p) {
        U256 key;
        for (unsigned t = 0; t < w; ++t) {
            uint64_t sym = p >= t ? static_cast<uint64_t>(x[p - t]) + 1 : 0;
            key.limb[t / 2] |= sym << (32 * (t % 2));
        }
        hv[p] = bh.eval(key);
    }
    const double base_rate = std::min(1.0, cfg.c_frag / static_cast<double>(kprime));

    std::vector<std::size_t> cuts;  // fragment start positions
    std::function<void(std::size_t, std::size_t, double)> split = [&](std::size_t lo, std::size_t hi, double rate) {
        // Piece x[lo, hi); lo is already a cut.
        uint64_t cut = rate >= 1.0 ? ~uint64_t{0} : static_cast<uint64_t>(std::ldexp(rate, 64));
        std::vector<std::size_t> inner{lo};
        for (std::size_t p = lo + 1; p < hi; ++p)
            if (rate >= 1.0 || hv[p] < cut) inner.push_back(p);
        inner.push_back(hi);
        for (std::size_t k = 0; k + 1 < inner.size(); ++k) {
            std::size_t a = inner[k], b = inner[k + 1];
            if (b - a <= kprime) {
                cuts.push_back(a);
            } else if (rate < 1.0) {
                ++d.stats.resplits;
                split(a, b, std::min(1.0, rate * 2));
            } else {
                ++d.stats.chunked;
                for (std::size_t c = a; c < b; c += kprime) cuts.push_back(c);
            }
        }
    };
    split(0, x.size(), base_rate);

    try {
        d.fragments.reserve(cuts.size());
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            std::size_t a = cuts[i], b = i + 1 < cuts.size() ? cuts[i + 1] : x.size();
            Fragment f;
            f.index = i;
            f.start = a;
            f.text = x.substr(a, b - a);
            f.grammar = parse_fragment(f.text, stream, &d.stats);
            d.fragments.push_back(std::move(f));
        }
    } catch (const HypothesisViolated&) {
        // Trivial decomposition into length-1 fragments.
        d.fragments.clear();
        d.stats.trivial_fallback = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
            Fragment f;
            f.index = i;
            f.start = i;
            f.text = x.substr(i, 1);
            f.grammar = parse_fragment(f.text, stream);
            d.fragments.push_back(std::move(f));
        }
    }
    return d;
}

std::optional<SymString> basic_decode(const Grammar& g, uint64_t n) {
    if (g.rules.empty()) return std::nullopt;
    std::unordered_map<uint64_t, RuleId> by_name;
    std::optional<RuleId> start;
    for (RuleId id : g.rules) {
        if ((id >> kRuleIdBits) != 0) return std::nullopt;
        unsigned kind = rule_kind_bits(id);
        if (kind > 2) return std::nullopt;
        if (kind == static_cast<unsigned>(RuleKind::Start)) {
            if (start) return std::nullopt;
            start = id;
        }
        uint64_t name = rule_name(id);
        if (name & kLiteralFlag) return std::nullopt;
        if (!by_name.emplace(name, id).second) return std::nullopt;
    }
    if (!start) return std::nullopt;

    // Lengths by memoised post-order DFS (colour marks detect cycles).
    std::unordered_map<uint64_t, uint64_t> len;
    std::unordered_map<uint64_t, uint8_t> colour;
    std::unordered_set<uint64_t> reached;
    bool bad = false;
    std::function<uint64_t(uint64_t)> ref_len = [&](uint64_t ref) -> uint64_t {
        if (bad) return 0;
        if (ref & kLiteralFlag) return 1;
        auto it = by_name.find(ref);
        if (it == by_name.end()) return bad = true, 0;
        auto c = colour[ref];
        if (c == 1) return bad = true, 0;
        if (c == 2) return len[ref];
        colour[ref] = 1;
        reached.insert(ref);
        RuleId id = it->second;
        uint64_t L = 0;
        switch (static_cast<RuleKind>(rule_kind_bits(id))) {
            case RuleKind::Pair: L = ref_len(rule_arg1(id)) + ref_len(rule_arg2(id)); break;
            case RuleKind::Run: {
                uint64_t m = rule_arg2(id);
                uint64_t c1 = ref_len(rule_arg1(id));
                if (m < 2 || (c1 != 0 && m > (n + 1) / c1 + 1)) bad = true;
                L = c1 * m;
                break;
            }
            case RuleKind::Start: bad = true; break;  // start rules are never referenced
        }
        if (L > n) bad = true;
        colour[ref] = 2;
        len[ref] = L;
        return L;
    };
    uint64_t root = rule_arg1(*start);
    uint64_t total = ref_len(root);
    reached.insert(rule_name(*start));
    if (bad || total != rule_arg2(*start) || total > n || total == 0) return std::nullopt;
    if (reached.size() != g.rules.size()) return std::nullopt;

    SymString out;
    out.reserve(total);
    std::function<void(uint64_t)> expand = [&](uint64_t ref) {
        if (ref & kLiteralFlag) {
            out.push_back(static_cast<Symbol>(ref & 0xFFFFFFFFu));
            return;
        }
        RuleId id = by_name.at(ref);
        if (static_cast<RuleKind>(rule_kind_bits(id)) == RuleKind::Pair) {
            expand(rule_arg1(id));
            expand(rule_arg2(id));
        } else {
            for (uint64_t i = 0; i < rule_arg2(id); ++i) expand(rule_arg1(id));
        }
    };
    expand(root);
    return out;
}

std::string u128_hex(u128 v) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (int sh = 124; sh >= 0; sh -= 4) s.push_back(digits[static_cast<unsigned>(v >> sh) & 0xF]);
    auto pos = s.find_first_not_of('0');
    return pos == std::string::npos ? "0" : s.substr(pos);
}

std::string grammar_dump(const Grammar& g) {
    static const char* kinds[] = {"pair", "run", "start", "?"};
    auto ref = [](uint64_t r) {
        return (r & kLiteralFlag) ? "'" + std::to_string(r & 0xFFFFFFFFu) + "'" : "#" + u128_hex(r);
    };
    std::string out;
    for (RuleId id : g.rules) {
        unsigned k = rule_kind_bits(id);
        out += u128_hex(id) + " " + kinds[k] + " ";
        if (k == 0) out += ref(rule_arg1(id)) + " " + ref(rule_arg2(id));
        else out += ref(rule_arg1(id)) + " " + std::to_string(rule_arg2(id));
        out += "\n";
    }
    return out;
}

}  // namespace edsketch
