#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "edsketch/calibrate.hpp"
#include "edsketch/errors.hpp"
#include "edsketch/pipeline.hpp"

using namespace edsketch;
using json = nlohmann::json;

namespace {

// Exit codes: 0 success, 1 usage or I/O error, 2 parameter constraint
// violated, 3 LARGE verdict, 4 incompatible sketches.
constexpr int kExitIo = 1, kExitConstraint = 2, kExitLarge = 3, kExitIncompatible = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string kind_letter(EdgeKind k) { return k == EdgeKind::D ? "D" : k == EdgeKind::V ? "V" : "H"; }

json edge_json(const AnnotatedEdge& e) {
    json j{{"kind", kind_letter(e.edge.kind)}, {"i", e.edge.i}, {"j", e.edge.j}};
    j["x"] = e.x_sym == kEps ? json(nullptr) : json(static_cast<uint32_t>(e.x_sym));
    j["y"] = e.y_sym == kEps ? json(nullptr) : json(static_cast<uint32_t>(e.y_sym));
    return j;
}

int report(const EdResult& r, const std::string& format) {
    if (format == "json") {
        json j{{"large", r.large}, {"slice_discipline", r.slice_discipline}};
        if (r.large) {
            j["reason"] = r.large_reason;
        } else {
            j["distance"] = r.distance;
            j["edits"] = json::array();
            for (const auto& e : r.edges) j["edits"].push_back(edge_json(e));
        }
        std::cout << j.dump(2) << "\n";
    } else if (r.large) {
        std::cout << "LARGE (" << r.large_reason << ")\n";
    } else {
        std::cout << r.distance << "\n";
        for (const auto& e : r.edges) std::cout << edge_to_text(e) << "\n";
    }
    return r.large ? kExitLarge : 0;
}

// Smallest power of two ≥ max(len, 40kP), so that the sketch is non-trivial
// whenever the input allows it.
uint64_t auto_n(std::size_t len, uint64_t k, double P) {
    uint64_t n = 8;
    while (n < len || static_cast<double>(n) < 40.0 * static_cast<double>(k) * P) n *= 2;
    return n;
}

struct SketchFlags {
    uint64_t k = 1, n = 0;
    std::string seed_hex;
    double gap = 1.5;
    std::string profile = "desk";
};

void add_sketch_flags(CLI::App* cmd, SketchFlags& f, bool need_n, bool need_seed) {
    cmd->add_option("--k", f.k, "Edit-distance bound k")->check(CLI::PositiveNumber);
    auto* n = cmd->add_option("--n", f.n, "Length bound n (a power of two)");
    if (need_n) n->required();
    auto* s = cmd->add_option("--seed", f.seed_hex, "Shared public randomness, 64 hex characters");
    if (need_seed) s->required();
    cmd->add_option("--gap", f.gap, "Gap P of the threshold fingerprint");
    cmd->add_option("--profile", f.profile, "Calibration profile")->check(CLI::IsMember({"desk", "paper"}));
}

Seed seed_or_default(const std::string& hex) { return hex.empty() ? Seed{} : seed_from_hex(hex); }

json calibrate(const std::vector<uint64_t>& ns, const std::vector<uint64_t>& kprimes, uint64_t trials,
               uint64_t rho_trials, const Seed& seed) {
    json out{{"rows", json::array()}};
    const std::vector<unsigned> edits{1, 2, 4, 8};
    double c_split = 0, c_eh = 0;
    for (uint64_t n : ns) {
        for (uint64_t kp : kprimes) {
            std::vector<double> xs, ys, rates;
            double eh = 0;
            for (unsigned e : edits) {
                SplitStats s = measure_split(n, kp, e, trials, seed);
                xs.push_back(static_cast<double>(e) / static_cast<double>(kp));
                ys.push_back(s.rate());
                rates.push_back(s.rate());
                for (double r : s.eh_ratios) eh = std::max(eh, r);
            }
            LinearFit fit = fit_through_origin(xs, ys);
            out["rows"].push_back(json{{"n", n},
                                       {"kprime", kp},
                                       {"edits", edits},
                                       {"split_rate", rates},
                                       {"c_split", fit.slope},
                                       {"r2", fit.r2},
                                       {"c_eh", eh}});
            c_split = std::max(c_split, fit.slope);
            c_eh = std::max(c_eh, eh);
        }
    }
    Profile desk = desk_profile();
    const uint64_t n = ns.back();
    GapStats g = measure_gap(desk.gap, n, 64, {1, 2, 4, 8, 16, 32, 64}, trials, seed);
    const double P = std::max(1.0, g.p_hat);
    const double c_k = static_cast<double>(ceil_pow2(32.0 * c_split * desk.polylog));
    out["c_split"] = c_split;
    out["c_eh"] = c_eh;
    out["p_hat"] = g.p_hat;
    out["gap_differ_rate"] = g.differ_rate;
    out["c_load"] = 2.0 * P * c_k;

    if (rho_trials > 0) {
        // Sketch once with the default repetition count and recover from
        // prefixes of the repetitions.
        Params p = derive_params(4, 1024, 1.5, desk);
        std::vector<uint64_t> ok(p.rho + 1, 0);
        std::mt19937_64 rng(seed[0]);
        for (uint64_t t = 0; t < rho_trials; ++t) {
            SymString x = random_symbols(rng, 1020, 26), y;
            do y = apply_random_edits(rng, x, 4, 26);
            while (edit_distance_dp(x, y) > 4);
            Seed s = seed;
            s[31] ^= static_cast<uint8_t>(t);
            EdSketch a = ed_sketch(x, p, s), b = ed_sketch(y, p, s);
            const EdgeSet truth = costly_annotated(x, y, canonical_alignment(x, y));
            for (uint32_t r = 1; r <= p.rho; r += 2) {
                EdSketch ar = a, br = b;
                ar.reps.resize(r);
                br.reps.resize(r);
                EdResult res = ed_recover(ar, br);
                if (!res.large && res.edges == truth) ++ok[r];
            }
        }
        uint32_t best = 0;
        json rates = json::object();
        for (uint32_t r = 1; r <= p.rho; r += 2) {
            double rate = static_cast<double>(ok[r]) / static_cast<double>(rho_trials);
            rates[std::to_string(r)] = rate;
            if (best == 0 && rate >= 0.9) best = r;
        }
        out["rho_success"] = rates;
        out["rho_min"] = best;
    }
    return out;
}

void print_calibration(const json& j) {
    std::cout << "n\tk'\tc_split\tR2\tc_EH\n";
    for (const auto& r : j["rows"])
        std::cout << r["n"] << "\t" << r["kprime"] << "\t" << r["c_split"].get<double>() << "\t"
                  << r["r2"].get<double>() << "\t" << r["c_eh"].get<double>() << "\n";
    std::cout << "c_split = " << j["c_split"].get<double>() << "\n";
    std::cout << "c_EH = " << j["c_eh"].get<double>() << "\n";
    std::cout << "P_hat = " << j["p_hat"].get<double>() << "\n";
    std::cout << "c_load = " << j["c_load"].get<double>() << " (derived: 2P·c_k)\n";
    if (j.contains("rho_min")) std::cout << "min repetitions for 90% success = " << j["rho_min"] << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edit-distance sketches: sketch strings, recover edit scripts from sketch pairs"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    SketchFlags sf;
    std::string in_file, out_file, encoding = "sparse";
    auto* sketch = app.add_subcommand("sketch", "Write the sketch of a file");
    sketch->add_option("file", in_file, "Input file (bytes are symbols)")->required();
    add_sketch_flags(sketch, sf, true, true);
    sketch->add_option("--out", out_file, "Output sketch path")->required();
    sketch->add_option("--encoding", encoding, "Bucket encoding")->check(CLI::IsMember({"sparse", "dense"}));

    std::string sk_a, sk_b;
    auto* recover = app.add_subcommand("recover", "Recover the edit script from two sketches");
    recover->add_option("sketch_a", sk_a)->required();
    recover->add_option("sketch_b", sk_b)->required();

    SketchFlags df;
    std::string file_a, file_b;
    bool verify = false;
    auto* diff = app.add_subcommand("diff", "Sketch two files in-process and recover");
    diff->add_option("file_a", file_a)->required();
    diff->add_option("file_b", file_b)->required();
    add_sketch_flags(diff, df, false, false);
    diff->add_flag("--verify", verify, "Cross-check against the exact edit distance");

    auto* ed = app.add_subcommand("ed", "Exact edit distance of two files");
    ed->add_option("file_a", file_a)->required();
    ed->add_option("file_b", file_b)->required();

    std::vector<uint64_t> cal_n{256, 1024}, cal_kp{64};
    uint64_t cal_trials = 200, rho_trials = 0;
    std::string cal_seed;
    auto* cal = app.add_subcommand("calibrate", "Measure the profile constants");
    cal->add_option("--n", cal_n, "Lengths to measure");
    cal->add_option("--kprime", cal_kp, "Decomposition sparsities to measure");
    cal->add_option("--trials", cal_trials, "Trials per edit count");
    cal->add_option("--rho-trials", rho_trials, "End-to-end trials for the repetition count (0 skips)");
    cal->add_option("--seed", cal_seed, "Seed, 64 hex characters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitIo;
    }

    try {
        if (*sketch) {
            SymString x = to_symbols(read_file(in_file));
            Profile prof = profile_by_name(sf.profile, sf.n);
            EdSketch sk = ed_sketch(x, sf.k, sf.n, sf.gap, seed_from_hex(sf.seed_hex), prof);
            auto bytes = serialize_sketch(sk, encoding == "dense" ? Encoding::Dense : Encoding::Sparse);
            write_file(out_file, bytes);
            const Params& p = sk.params;
            if (format == "json") {
                std::cout << json{{"bytes", bytes.size()}, {"n", p.n},           {"k", p.k},
                                  {"d", p.d},          {"t0", p.t.front()},     {"repetitions", sk.reps.size()},
                                  {"trivial", p.trivial}, {"dense_bytes", dense_sketch_size(p)}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << "wrote " << bytes.size() << " bytes to " << out_file << " (n=" << p.n << " k=" << p.k
                          << " d=" << p.d << " t0=" << p.t.front() << " repetitions=" << sk.reps.size()
                          << (p.trivial ? " trivial" : "") << ")\n";
            }
            return 0;
        }
        if (*recover) {
            auto load = [](const std::string& path) {
                std::string s = read_file(path);
                return deserialize_sketch(std::vector<uint8_t>(s.begin(), s.end()));
            };
            return report(ed_recover(load(sk_a), load(sk_b)), format);
        }
        if (*diff) {
            SymString x = to_symbols(read_file(file_a)), y = to_symbols(read_file(file_b));
            uint64_t n = df.n ? df.n : auto_n(std::max(x.size(), y.size()), df.k, df.gap);
            Profile prof = profile_by_name(df.profile, n);
            Params p = derive_params(df.k, n, df.gap, prof);
            Seed seed = seed_or_default(df.seed_hex);
            EdResult r = ed_recover(ed_sketch(x, p, seed), ed_sketch(y, p, seed));
            int rc = report(r, format);
            if (verify) {
                uint64_t truth = edit_distance_dp(x, y);
                bool agree = r.large ? truth > df.k : (truth == r.distance && reconstruct_other(x, r.edges) == y);
                std::cerr << "verify: exact distance " << truth << (agree ? " (agrees)" : " (DISAGREES)") << "\n";
                if (!agree) return kExitIo;
            }
            return rc;
        }
        if (*ed) {
            uint64_t v = edit_distance_dp(to_symbols(read_file(file_a)), to_symbols(read_file(file_b)));
            if (format == "json") std::cout << json{{"distance", v}}.dump() << "\n";
            else std::cout << v << "\n";
            return 0;
        }
        if (*cal) {
            json j = calibrate(cal_n, cal_kp, cal_trials, rho_trials, seed_or_default(cal_seed));
            if (format == "json") std::cout << j.dump(2) << "\n";
            else print_calibration(j);
            return 0;
        }
    } catch (const ConstraintViolated& e) {
        std::cerr << e.what() << "\n";
        return kExitConstraint;
    } catch (const FieldTooSmall& e) {
        std::cerr << e.what() << "\n";
        return kExitConstraint;
    } catch (const EncodingOverflow& e) {
        std::cerr << e.what() << "\n";
        return kExitConstraint;
    } catch (const InputTooLong& e) {
        std::cerr << e.what() << "\n";
        return kExitConstraint;
    } catch (const IncompatibleSketch& e) {
        std::cerr << e.what() << "\n";
        return kExitIncompatible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
