#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edsketch/align.hpp"
#include "edsketch/decomp.hpp"
#include "edsketch/fingerprint.hpp"
#include "edsketch/randomness.hpp"

namespace edsketch {

// Random test strings and planted edits, shared by calibration and tests.
SymString random_symbols(std::mt19937_64& rng, std::size_t len, unsigned alphabet);
// Applies `edits` uniformly random substitutions/insertions/deletions.
SymString apply_random_edits(std::mt19937_64& rng, SymString x, unsigned edits, unsigned alphabet);

// True iff both decompositions have the same fragment count and the
// canonical alignment of (x, y) passes through every pair of corresponding
// fragment boundaries.
bool decompositions_compatible(const SymString& x, const SymString& y, const Decomposition& dx,
                               const Decomposition& dy);

struct SplitStats {
    uint64_t n = 0, kprime = 0;
    unsigned edits = 0;
    uint64_t trials = 0;
    uint64_t incompatible = 0;
    // For every compatible fragment pair with ED > 0: |rules Δ| / (log²n · ED).
    std::vector<double> eh_ratios;
    double rate() const { return trials ? static_cast<double>(incompatible) / trials : 0.0; }
};

SplitStats measure_split(uint64_t n, uint64_t kprime, unsigned edits, uint64_t trials, const Seed& seed,
                         const DecompConfig& cfg = {}, unsigned alphabet = 26);

// Least-squares fit of rate = c·(e/k') through the origin, with R².
struct LinearFit {
    double slope = 0, r2 = 0;
};
LinearFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

struct GapStats {
    uint64_t n = 0, t = 0, trials = 0;
    std::vector<unsigned> eds;
    std::vector<double> differ_rate;
    double p_hat = 0;  // max over ED ≤ t of rate·t/ED
};

GapStats measure_gap(const GapConfig& cfg, uint64_t n, uint64_t t, const std::vector<unsigned>& eds, uint64_t trials,
                     const Seed& seed, unsigned alphabet = 4);

}  // namespace edsketch
