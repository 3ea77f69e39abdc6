// Command-line front end: derivation, identity verification, permutation
// scans, collision witnesses, point counts and admissibility thresholds.
//
// Exit codes: 0 success/pass, 1 check-or-search failure, 2 usage or parse
// error.  One JSON document (or text report, --format text) per run on
// stdout; notices and warnings go to stderr.

#include "permrat/derivation.h"
#include "permrat/identities.h"
#include "permrat/search.h"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace permrat;

namespace {

struct GlobalOpts {
    std::string cache = "./cache";
    unsigned workers = 0;  // 0 = hardware default
    u64 scan_budget = kScanBudget;
    u64 count_budget = kCountBudget;
    std::string format = "json";
    u64 seed = 1;

    bool as_json() const { return format == "json"; }
};

void warn(const std::string& msg) { std::cerr << "permrat: " << msg << "\n"; }

u64 parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad " + what + ": '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& what) {
    u64 v = parse_u64(s, what);
    if (v > 64) throw ParseError(what + " out of range: '" + s + "'");
    return int(v);
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

void print_report_text(const Report& r) {
    for (const auto& c : r.checks) {
        std::cout << c.id << "  " << status_name(c.status);
        if (!c.details.empty()) std::cout << "  [" << c.details << "]";
        std::cout << "  (" << c.ms << " ms)\n";
        if (c.status == CheckStatus::fail) {
            if (!c.expected.empty()) std::cout << "    expected: " << c.expected << "\n";
            if (!c.actual.empty()) std::cout << "    actual:   " << c.actual << "\n";
        }
    }
    std::size_t fails = 0, warns = 0;
    for (const auto& c : r.checks) {
        fails += c.status == CheckStatus::fail;
        warns += c.status == CheckStatus::warn;
    }
    std::cout << "verdict: " << r.verdict() << " (" << r.checks.size() << " checks, " << fails
              << " failed, " << warns << " warned)\n";
}

void print_instance_text(const ProblemInstance& inst) {
    std::cout << "field: p=" << inst.cfg.p << " n=" << inst.cfg.n
              << " modulus=" << ext_to_string(inst.cfg.modulus)
              << "  b=" << ext_to_string(inst.b) << " (t=" << inst.t << ")\n";
}

void print_count_text(const CountRecord& r) {
    std::cout << r.id << ": " << r.count << " points over F_" << r.p << "^" << r.k << "\n";
    if (r.degree != 0) {
        std::cout << "  degree " << r.degree << " lower bound p^2 - " << r.bound_coeff
                  << " p^{3/2} - 5*" << r.degree << "^{13/3} p in [" << r.bound_lo << ", "
                  << r.bound_hi << "]" << (r.bound_vacuous ? " (vacuous at this p)" : "")
                  << "\n";
    }
}

// ---------------------------------------------------------------------------
// derive
// ---------------------------------------------------------------------------

json poly_stats(const PolyZZ& f) {
    return {{"terms", f.nterms()}, {"degree", f.degree()}, {"degree_main", f.degree_main()}};
}

int run_derive(const GlobalOpts& g, int n, const std::string& out) {
    json rec{{"schema", 1}, {"record", "derive"}, {"n", n}, {"out", out}};
    if (n == 3) {
        DerivedSystem3 sys = obtain_n3(out, /*repair=*/true);
        rec["polys"] = {{"n3_P.poly", poly_stats(sys.P)},
                        {"n3_Q.poly", poly_stats(sys.Q)},
                        {"n3_G.poly", poly_stats(sys.G)}};
    } else {
        DerivedSystem4 sys = obtain_n4(out, /*repair=*/true);
        rec["polys"] = {{"n4_A.poly", poly_stats(sys.A)}, {"n4_B.poly", poly_stats(sys.B)},
                        {"n4_P.poly", poly_stats(sys.P)}, {"n4_Q.poly", poly_stats(sys.Q)},
                        {"n4_G.poly", poly_stats(sys.G)}, {"n4_L.poly", poly_stats(sys.L)}};
    }
    if (g.as_json()) {
        std::cout << rec.dump(2) << "\n";
    } else {
        for (const auto& [file, st] : rec["polys"].items())
            std::cout << file << ": " << st["terms"] << " terms, degree " << st["degree"]
                      << " (main block " << st["degree_main"] << ")\n";
        std::cout << "written to " << out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int emit_report(const GlobalOpts& g, const Report& r) {
    if (g.as_json())
        std::cout << report_to_json(r) << "\n";
    else
        print_report_text(r);
    return r.passed() ? 0 : 1;
}

int run_verify_n(const GlobalOpts& g, int n) {
    if (n == 3) return emit_report(g, verify_n3(obtain_n3(g.cache)));
    return emit_report(g, verify_n4(obtain_n4(g.cache)));
}

int run_verify_lemma21(const GlobalOpts& g, const std::vector<std::string>& args, int trials) {
    u64 p = parse_u64(args[0], "prime");
    int n = parse_int(args[1], "extension degree");
    return emit_report(g, verify_lemma21(p, n, trials > 0 ? trials : 100, g.seed));
}

int run_verify_diff(const GlobalOpts& g, const std::vector<std::string>& args, int trials) {
    u64 p = parse_u64(args[0], "prime");
    int n = parse_int(args[1], "extension degree");
    FieldConfig F = make_field(p, n);
    ExtElement b = ext_parse(F, args[2]);
    return emit_report(g, verify_difference_identity(p, n, b, trials > 0 ? trials : 200, g.seed));
}

// ---------------------------------------------------------------------------
// permtest
// ---------------------------------------------------------------------------

int run_permtest_all(const GlobalOpts& g, u64 p, int n, int extras) {
    Classification c = classify_all_b(p, n, extras, g.seed, g.scan_budget);
    if (g.as_json()) {
        std::cout << classification_to_json(c) << "\n";
    } else {
        std::cout << "p=" << c.p << " n=" << c.n << " modulus=" << c.modulus << " seed=" << c.seed
                  << "\n";
        for (const auto& [cls, verdict] : c.verdict_by_trace)
            std::cout << "trace " << cls << ": "
                      << (verdict ? "permutation" : "not a permutation") << "\n";
        std::cout << (c.consistent_within_class ? "all sampled b agree with their trace class"
                                                : "CLASS INCONSISTENCY among sampled b")
                  << "\n";
    }
    return c.consistent_within_class ? 0 : 1;
}

int run_permtest_single(const GlobalOpts& g, u64 p, int n, const std::string& bcoords) {
    FieldConfig F = make_field(p, n);
    ProblemInstance inst = make_instance(F, ext_parse(F, bcoords));
    PermutationScan s = is_permutation(inst, g.scan_budget);
    if (g.as_json()) {
        std::cout << scan_to_json(inst, s) << "\n";
    } else {
        print_instance_text(inst);
        std::cout << (s.is_permutation ? "permutation" : "not a permutation") << " (image "
                  << s.image_size << "/" << s.domain << ")\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// witness
// ---------------------------------------------------------------------------

int run_witness(const GlobalOpts& g, u64 p, int n, const std::string& bcoords,
                std::string method) {
    FieldConfig F = make_field(p, n);
    ProblemInstance inst = make_instance(F, ext_parse(F, bcoords));

    bool variety_applicable =
        (p > 2) && (n == 3 || (n == 4 && inst.b == ext_inv(F, ext_from_u64(F, 2))));
    if (method == "auto") method = variety_applicable ? "variety" : "brute";
    if (method == "variety" && !variety_applicable) {
        warn(n == 4 ? "variety reconstruction covers n=4 only at b=1/2; using brute force"
                    : "variety reconstruction needs n in {3,4} and odd p; using brute force");
        method = "brute";
    }

    std::optional<Witness> w;
    if (method == "variety") {
        try {
            if (n == 3)
                w = variety_witness(inst, obtain_n3(g.cache), g.scan_budget);
            else
                w = variety_witness(inst, obtain_n4(g.cache), g.scan_budget);
        } catch (const NoVarietyPoint& e) {
            warn(std::string(e.what()) + "; falling back to brute force");
        }
    }
    if (!w) {
        try {
            w = find_collision_brute(inst, g.scan_budget);
        } catch (const NotFound& e) {
            json rec{{"schema", 1},
                     {"record", "witness_not_found"},
                     {"p", p},
                     {"n", n},
                     {"modulus", ext_to_string(F.modulus)},
                     {"b", ext_to_string(inst.b)},
                     {"t", inst.t},
                     {"reason", e.what()}};
            if (g.as_json())
                std::cout << rec.dump(2) << "\n";
            else {
                print_instance_text(inst);
                std::cout << "no collision: " << e.what() << "\n";
            }
            return 1;
        }
    }

    validate_witness(inst, *w);  // re-check every invariant before printing
    if (g.as_json()) {
        std::cout << witness_to_json(inst, *w) << "\n";
    } else {
        print_instance_text(inst);
        std::cout << "collision witness (" << witness_method_name(w->method)
                  << "): x=" << ext_to_string(w->x) << " y=" << ext_to_string(w->y)
                  << " delta=" << ext_to_string(w->delta) << " z=" << ext_to_string(w->z)
                  << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

struct LoadedPoly {
    std::string name;
    VarSet vars;
    PolyZZ f;
};

LoadedPoly load_poly_file(const std::string& path, const std::vector<std::string>& params) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();

    std::istringstream is(text);
    std::string line;
    std::vector<std::string> names;
    while (std::getline(is, line)) {
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] != "vars:") throw ParseError(path + ": missing vars: header");
        names.assign(toks.begin() + 1, toks.end());
        break;
    }
    if (names.empty()) throw ParseError(path + ": no variables declared");
    std::vector<std::string> present;
    for (const auto& pv : params)
        if (std::find(names.begin(), names.end(), pv) != names.end()) present.push_back(pv);
    VarSet vars = make_varset(names, present);
    return {fs::path(path).filename().string(), vars, parse_poly(ZZRing{}, vars, text)};
}

int run_count(const GlobalOpts& g, u64 p, const std::vector<std::string>& files, bool moore,
              long long t_in, const std::vector<std::string>& params, unsigned degree_override) {
    std::vector<LoadedPoly> loaded;
    for (const auto& f : files) loaded.push_back(load_poly_file(f, params));
    for (std::size_t i = 1; i < loaded.size(); ++i)
        if (loaded[i].vars != loaded[0].vars)
            throw ParseError(loaded[i].name + ": variable set differs from " + loaded[0].name);

    const VarSet& vars = loaded[0].vars;
    auto block = vars.main_block();
    int k = int(block.size());
    bool has_params = block.size() != vars.size();
    if (has_params && t_in < 0)
        throw ParseError("the input has parameter variables; supply --t");
    if (!has_params && t_in >= 0) warn("--t ignored: no parameter variables");

    std::vector<PolyFp> reduced;
    for (const auto& lp : loaded) {
        PolyFp f = reduce_mod_p(lp.f, p);
        if (has_params) {
            u64 t = u64(t_in) % p;
            for (std::size_t v = 0; v < vars.size(); ++v)
                if (vars.is_param(v)) f = f.substitute_value(v, t);
        }
        reduced.push_back(std::move(f));
    }

    unsigned degree = degree_override ? degree_override : reduced[0].degree_main();

    json rec{{"schema", 1}, {"record", "count_report"}, {"p", p}, {"k", k}, {"moore", moore}};
    rec["polys"] = json::array();
    for (const auto& lp : loaded) rec["polys"].push_back(lp.name);
    if (has_params) rec["t"] = u64(t_in) % p;

    CountRecord primary;
    std::optional<CountRecord> joint;
    if (moore) {
        FieldConfig F = make_field(p, k);
        rec["extension_modulus"] = ext_to_string(F.modulus);
        std::vector<PolyFp> fp_sys;
        std::vector<PolyExt> ext_sys;
        bool first_projects = false;
        for (std::size_t i = 0; i < reduced.size(); ++i) {
            MooreImage img = moore_transform_ext(reduced[i], F);
            if (i == 0) rec["normal_z"] = ext_to_string(img.z);
            if (auto back = try_to_prime_field(img.g)) {
                if (i == 0) first_projects = true;
                fp_sys.push_back(std::move(*back));
            } else {
                ext_sys.push_back(std::move(img.g));
            }
        }
        primary = first_projects
                      ? count_points({fp_sys[0]}, p, k, loaded[0].name, g.workers,
                                     g.count_budget, degree)
                      : count_points_joint({}, {ext_sys[0]}, F, k, loaded[0].name, g.workers,
                                           g.count_budget);
        if (loaded.size() > 1)
            joint = count_points_joint(fp_sys, ext_sys, F, k, "intersection", g.workers,
                                       g.count_budget);
    } else {
        primary = count_points({reduced[0]}, p, k, loaded[0].name, g.workers, g.count_budget,
                               degree);
        if (loaded.size() > 1)
            joint = count_points(reduced, p, k, "intersection", g.workers, g.count_budget);
    }

    bool within = true;
    rec["primary"] = json::parse(count_to_json(primary));
    if (joint) {
        Integer bound = Integer(degree) * Integer(degree) * Integer(p);
        within = Integer(joint->count) <= bound;
        rec["joint"] = json::parse(count_to_json(*joint));
        rec["intersection_bound"] = bound.str();
        rec["within_bound"] = within;
    }

    if (g.as_json()) {
        std::cout << rec.dump(2) << "\n";
    } else {
        print_count_text(primary);
        if (joint) {
            print_count_text(*joint);
            std::cout << "intersection bound " << degree << "^2 p = "
                      << rec["intersection_bound"].get<std::string>() << ": "
                      << (within ? "holds" : "VIOLATED") << "\n";
        }
    }
    return within ? 0 : 1;
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

int run_threshold(const GlobalOpts& g, int n) {
    unsigned d = n == 3 ? 18u : 46u;
    Threshold t = lang_weil_threshold(d, lang_weil_coeff(d));
    if (g.as_json()) {
        std::cout << threshold_to_json(t) << "\n";
    } else {
        std::cout << "d=" << t.d << " coeff=" << t.coeff << " C in [" << t.c_lo << ", " << t.c_hi
                  << "]\n"
                  << "least admissible integer " << t.least_admissible << ", least prime "
                  << t.least_prime << " (prime index " << t.prime_ordinal << ")\n"
                  << "closed-form brackets: " << t.bracket_with_coeff_minus_1 << " / "
                  << t.bracket_with_coeff << "\n";
    }
    return 0;
}

int guarded(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        warn(e.what());
        return 2;
    } catch (const DomainMismatch& e) {
        warn(e.what());
        return 2;
    } catch (const ZeroTrace& e) {
        warn(std::string(e.what()) + " (b must have nonzero trace)");
        return 2;
    } catch (const NotPrime& e) {
        warn(e.what());
        return 2;
    } catch (const DegreeOutOfRange& e) {
        warn(e.what());
        return 2;
    } catch (const Error& e) {
        warn(e.what());
        return 1;
    } catch (const std::exception& e) {
        warn(e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact elimination systems and search tools for x + 1/(x^p - x + b)"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--cache", g.cache, "artifact cache directory")
        ->envname("PERMRAT_CACHE_DIR")
        ->capture_default_str();
    app.add_option("--workers", g.workers, "worker threads for counting scans (0 = auto)")
        ->capture_default_str();
    app.add_option("--scan-budget", g.scan_budget, "max field elements per search scan")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--count-budget", g.count_budget, "max points per counting scan")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed for randomized suites")->capture_default_str();

    auto* cderive = app.add_subcommand("derive", "run the elimination and write .poly files");
    cderive->fallthrough();
    int derive_n = 0;
    std::string derive_out;
    cderive->add_option("--n", derive_n, "extension degree")
        ->required()
        ->check(CLI::IsMember({3, 4}));
    cderive->add_option("--out", derive_out, "output directory (default: cache dir)");

    auto* cverify = app.add_subcommand("verify", "check the identity suites");
    cverify->fallthrough();
    int verify_n = 0;
    std::vector<std::string> lemma_args, diff_args;
    int trials = 0;
    cverify->add_option("--n", verify_n, "verify the derived system for this degree")
        ->check(CLI::IsMember({3, 4}));
    cverify->add_option("--lemma21", lemma_args, "Moore-substitution property suite: p n")
        ->expected(2);
    cverify->add_option("--diff", diff_args, "difference-quotient suite: p n b")->expected(3);
    cverify->add_option("--trials", trials, "trial count for randomized suites");

    auto* cperm = app.add_subcommand("permtest", "permutation verdicts by exhaustive image scan");
    cperm->fallthrough();
    u64 perm_p = 0;
    int perm_n = 0, perm_extras = 2;
    std::string perm_b;
    bool perm_all = false;
    cperm->add_option("--p", perm_p, "prime")->required();
    cperm->add_option("--n", perm_n, "extension degree")->required();
    cperm->add_option("--b", perm_b, "b as coordinates c0,c1,...,c{n-1}");
    cperm->add_flag("--all-b", perm_all, "one b per nonzero trace class plus random extras");
    cperm->add_option("--extras", perm_extras, "extra random b per trace class")
        ->capture_default_str();

    auto* cwit = app.add_subcommand("witness", "find and validate a collision witness");
    cwit->fallthrough();
    u64 wit_p = 0;
    int wit_n = 0;
    std::string wit_b, wit_method = "auto";
    cwit->add_option("--p", wit_p, "prime")->required();
    cwit->add_option("--n", wit_n, "extension degree")->required();
    cwit->add_option("--b", wit_b, "b as coordinates c0,c1,...,c{n-1}")->required();
    cwit->add_option("--method", wit_method, "search method")
        ->check(CLI::IsMember({"auto", "brute", "variety"}))
        ->capture_default_str();

    auto* ccount = app.add_subcommand("count", "exact point counts over F_p^k");
    ccount->fallthrough();
    u64 count_p = 0;
    std::vector<std::string> count_files, count_params = {"T"};
    bool count_moore = false;
    long long count_t = -1;
    unsigned count_degree = 0;
    ccount->add_option("--p", count_p, "prime")->required();
    ccount->add_option("--poly", count_files, ".poly file; repeat to intersect")->required();
    ccount->add_flag("--moore", count_moore,
                     "substitute the Moore matrix of F_{p^k} before counting");
    ccount->add_option("--t", count_t, "value for parameter variables (mod p)")
        ->check(CLI::NonNegativeNumber);
    ccount->add_option("--param", count_params, "variable names treated as parameters")
        ->capture_default_str();
    ccount->add_option("--degree", count_degree,
                       "surface degree for the lower-bound report (default: main degree)");

    auto* cthr = app.add_subcommand("threshold", "least admissible prime for the image bound");
    cthr->fallthrough();
    int thr_n = 0;
    cthr->add_option("--n", thr_n, "extension degree")->required()->check(CLI::IsMember({3, 4}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (derive_out.empty()) derive_out = g.cache;

    return guarded([&]() -> int {
        if (cderive->parsed()) return run_derive(g, derive_n, derive_out);
        if (cverify->parsed()) {
            int modes = (verify_n != 0) + !lemma_args.empty() + !diff_args.empty();
            if (modes != 1) {
                warn("verify needs exactly one of --n, --lemma21, --diff");
                return 2;
            }
            if (verify_n != 0) return run_verify_n(g, verify_n);
            if (!lemma_args.empty()) return run_verify_lemma21(g, lemma_args, trials);
            return run_verify_diff(g, diff_args, trials);
        }
        if (cperm->parsed()) {
            if (perm_all == !perm_b.empty()) {
                warn("permtest needs exactly one of --b, --all-b");
                return 2;
            }
            return perm_all ? run_permtest_all(g, perm_p, perm_n, perm_extras)
                            : run_permtest_single(g, perm_p, perm_n, perm_b);
        }
        if (cwit->parsed()) return run_witness(g, wit_p, wit_n, wit_b, wit_method);
        if (ccount->parsed())
            return run_count(g, count_p, count_files, count_moore, count_t, count_params,
                             count_degree);
        if (cthr->parsed()) return run_threshold(g, thr_n);
        return 2;
    });
}
