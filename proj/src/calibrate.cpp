#include "edsketch/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace edsketch {

SymString random_symbols(std::mt19937_64& rng, std::size_t len, unsigned alphabet) {
    SymString s(len, 0);
    for (auto& c : s) c = static_cast<Symbol>('a' + rng() % alphabet);
    return s;
}

SymString apply_random_edits(std::mt19937_64& rng, SymString x, unsigned edits, unsigned alphabet) {
    for (unsigned e = 0; e < edits; ++e) {
        unsigned op = x.empty() ? 1 : static_cast<unsigned>(rng() % 3);
        if (op == 0) {
            std::size_t p = rng() % x.size();
            Symbol c;
            do c = static_cast<Symbol>('a' + rng() % alphabet);
            while (c == x[p] && alphabet > 1);
            x[p] = c;
        } else if (op == 1) {
            std::size_t p = rng() % (x.size() + 1);
            x.insert(x.begin() + static_cast<std::ptrdiff_t>(p), static_cast<Symbol>('a' + rng() % alphabet));
        } else {
            x.erase(x.begin() + static_cast<std::ptrdiff_t>(rng() % x.size()));
        }
    }
    return x;
}

bool decompositions_compatible(const SymString& x, const SymString& y, const Decomposition& dx,
                               const Decomposition& dy) {
    if (dx.fragments.size() != dy.fragments.size()) return false;
    auto a = canonical_alignment(x, y);
    std::set<Point> on_path{a.start};
    for (const auto& e : a.edges) on_path.insert(e.head());
    for (std::size_t i = 0; i < dx.fragments.size(); ++i) {
        if (dx.fragments[i].index != dy.fragments[i].index) return false;
        if (!on_path.count({dx.fragments[i].start, dy.fragments[i].start})) return false;
    }
    return true;
}

SplitStats measure_split(uint64_t n, uint64_t kprime, unsigned edits, uint64_t trials, const Seed& seed,
                         const DecompConfig& cfg, unsigned alphabet) {
    SplitStats st;
    st.n = n, st.kprime = kprime, st.edits = edits, st.trials = trials;
    std::mt19937_64 rng(seed[0] * 1000003ULL + n * 31 + kprime * 7 + edits);
    const double log2n = std::log2(static_cast<double>(n));
    for (uint64_t t = 0; t < trials; ++t) {
        SymString x = random_symbols(rng, n - edits, alphabet);
        SymString y = apply_random_edits(rng, x, edits, alphabet);
        if (y.size() > n) y.resize(n);
        Stream s(seed, {{Tag::Repetition, t}, {Tag::Purpose, static_cast<uint64_t>(Purpose::Decomp)}});
        auto dx = basic_decomp(x, n, kprime, s, cfg);
        auto dy = basic_decomp(y, n, kprime, s, cfg);
        if (!decompositions_compatible(x, y, dx, dy)) {
            ++st.incompatible;
            continue;
        }
        for (std::size_t i = 0; i < dx.fragments.size(); ++i) {
            const auto& fx = dx.fragments[i];
            const auto& fy = dy.fragments[i];
            uint64_t ed = edit_distance_dp(fx.text, fy.text);
            if (ed == 0) continue;
            std::vector<RuleId> diff;
            std::set_symmetric_difference(fx.grammar.rules.begin(), fx.grammar.rules.end(), fy.grammar.rules.begin(),
                                          fy.grammar.rules.end(), std::back_inserter(diff));
            st.eh_ratios.push_back(static_cast<double>(diff.size()) / (log2n * log2n * static_cast<double>(ed)));
        }
    }
    return st;
}

LinearFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += x[i] * y[i], sxx += x[i] * x[i];
    LinearFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0;
    double mean = 0;
    for (double v : y) mean += v;
    mean /= std::max<std::size_t>(1, y.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += (y[i] - f.slope * x[i]) * (y[i] - f.slope * x[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    f.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1.0;
    return f;
}

GapStats measure_gap(const GapConfig& cfg, uint64_t n, uint64_t t, const std::vector<unsigned>& eds, uint64_t trials,
                     const Seed& seed, unsigned alphabet) {
    GapStats st;
    st.n = n, st.t = t, st.trials = trials, st.eds = eds;
    std::mt19937_64 rng(seed[1] * 7919ULL + n + t * 13);
    for (unsigned e : eds) {
        uint64_t differ = 0;
        for (uint64_t k = 0; k < trials; ++k) {
            SymString x = random_symbols(rng, n - e, alphabet);
            SymString y = apply_random_edits(rng, x, e, alphabet);
            Stream s(seed, {{Tag::Fingerprint, k}, {Tag::Level, t}});
            GapFingerprinter fp(cfg, n, t, s);
            differ += fp.value(x) != fp.value(y);
        }
        double rate = static_cast<double>(differ) / static_cast<double>(trials);
        st.differ_rate.push_back(rate);
        if (e > 0 && e <= t) st.p_hat = std::max(st.p_hat, rate * static_cast<double>(t) / e);
    }
    return st;
}

}  // namespace edsketch
