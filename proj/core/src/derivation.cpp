#include "permrat/derivation.h"

#include "permrat/primes.h"
#include "permrat/sha256.h"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace permrat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(const PolyZZ& f, const std::string& name) {
    std::ostringstream os;
    os << name << ": " << f.nterms() << " terms, degree " << f.degree_main();
    return os.str();
}

PolyZZ constant(const VarSet& vs, long v) {
    return PolyZZ::constant(ZZRing{}, vs, Integer(v));
}

PolyZZ variable(const VarSet& vs, const std::string& name) {
    return PolyZZ::variable(ZZRing{}, vs, name);
}

}  // namespace

RationalZZ delta_square_expr(const VarSet& vars, std::size_t i) {
    auto block = vars.main_block();
    std::size_t m = block.size();
    if (i >= m) throw Error("delta_square_expr: index out of range");
    const std::string& yi = vars.names[block[i]];
    const std::string& yj = vars.names[block[(i + 1) % m]];
    auto Yi = variable(vars, yi), Yj = variable(vars, yj);
    // (Yi^2 + Yj^2 - 2 Yi Yj - 4) + 4 Yj / Yi, over the denominator Yi.
    auto num = Yi * Yi * Yi + Yi * Yj * Yj - constant(vars, 2) * Yi * Yi * Yj -
               constant(vars, 4) * Yi + constant(vars, 4) * Yj;
    return RationalZZ::of(std::move(num), Yi, true);
}

DerivedSystem3 derive_n3() {
    DerivedSystem3 sys;
    sys.vars = make_varset({"T", "Y1", "Y2", "Y3"}, {"T"});
    const VarSet& vars = sys.vars;
    auto& log = sys.log;

    auto T = variable(vars, "T");
    std::array<PolyZZ, 3> Y = {variable(vars, "Y1"), variable(vars, "Y2"), variable(vars, "Y3")};
    PolyZZ prodY = Y[0] * Y[1] * Y[2];
    std::array<RationalZZ, 3> D = {delta_square_expr(vars, 0), delta_square_expr(vars, 1),
                                   delta_square_expr(vars, 2)};
    for (int i = 0; i < 3; ++i)
        log.push_back("D" + std::to_string(i + 1) + ": numerator " +
                      std::to_string(D[i].num.nterms()) + " terms over Y" + std::to_string(i + 1));

    // Q is the numerator of T^2 + D1 - D2 - D3 over Y1 Y2 Y3.
    RationalZZ S = RationalZZ::whole(T * T).add(D[0]).sub(D[1]).sub(D[2]);
    if (!(S.den == prodY))
        throw DerivationMismatch("combined increment expression: unexpected denominator");
    sys.Q = S.num;
    log.push_back(fmt(sys.Q, "Q := numerator of T^2 + D1 - D2 - D3 over Y1*Y2*Y3"));

    // P is the numerator of S^2 + 4 T^2 D1 - 4 D2 D3 over (Y1 Y2 Y3)^2.
    RationalZZ four_t2_d1 = RationalZZ::whole(constant(vars, 4) * T * T).mul(D[0]);
    RationalZZ four_d2_d3 = RationalZZ::whole(constant(vars, 4)).mul(D[1]).mul(D[2]);
    RationalZZ top = S.mul(S).add(four_t2_d1).sub(four_d2_d3);
    if (!(top.den == prodY * prodY))
        throw DerivationMismatch("quadratic combination: unexpected denominator");
    sys.P = top.num;
    log.push_back(fmt(sys.P, "P := numerator of S^2 + 4T^2 D1 - 4 D2 D3 over (Y1*Y2*Y3)^2"));

    // Delta1 = P / (4 T Y1 Y2 Y3 Q) in lowest terms.
    RationalZZ bottom = RationalZZ::whole(constant(vars, 4) * T).mul(S);
    RationalZZ delta1 = top.div(bottom).reduce_structural();
    PolyZZ expected_den = constant(vars, 4) * T * prodY * sys.Q;
    if (!(delta1.den == expected_den) || !(delta1.num == sys.P))
        throw DerivationMismatch("principal increment: expected P / (4T Y1 Y2 Y3 Q)");
    {
        bool coprime = true;
        for (const auto& f : {T, Y[0], Y[1], Y[2], sys.Q}) coprime = coprime && !f.divides(sys.P);
        log.push_back(std::string("Delta1 = P / (4T Y1 Y2 Y3 Q); structural coprimality of P with "
                                  "T, Y_i, Q: ") +
                      (coprime ? "confirmed" : "FAILED"));
        if (!coprime) throw DerivationMismatch("principal increment not in lowest terms");
    }

    // G is the numerator of Delta1^2 - D1 over 16 T^2 (Y1 Y2 Y3)^2 Q^2.
    RationalZZ gexpr = delta1.mul(delta1).sub(D[0]);
    PolyZZ gden = constant(vars, 16) * T * T * prodY * prodY * sys.Q * sys.Q;
    if (!(gexpr.den == gden))
        throw DerivationMismatch("vanishing condition: unexpected denominator");
    sys.G = gexpr.num;
    log.push_back(fmt(sys.G, "G := numerator of Delta1^2 - D1 over 16 T^2 (Y1 Y2 Y3)^2 Q^2"));

    // Defining relation, re-checked symbolically.
    {
        PolyZZ rhs = sys.P * sys.P -
                     constant(vars, 16) * T * T * Y[0] * Y[1] * Y[1] * Y[2] * Y[2] * D[0].num *
                         sys.Q * sys.Q;
        if (!(sys.G == rhs))
            throw DerivationMismatch("G does not satisfy G = P^2 - 16 T^2 Y1 Y2^2 Y3^2 n1 Q^2");
        log.push_back("defining relation G = P^2 - 16 T^2 Y1 Y2^2 Y3^2 n1 Q^2: verified");
    }

    sys.components = sys.G.homogeneous_components();
    {
        std::vector<unsigned> keys;
        for (const auto& [d, c] : sys.components) keys.push_back(d);
        if (keys != std::vector<unsigned>{12, 14, 16, 18})
            throw DerivationMismatch("G: homogeneous component degrees are not {12,14,16,18}");
        if (!sys.G.is_cyclic()) throw DerivationMismatch("G is not cyclic");
        if (sys.G.degree_main() != 18) throw DerivationMismatch("G degree != 18");
        log.push_back("G: cyclic, Y-degree 18, components of Y-degree {12,14,16,18}, content " +
                      sys.G.content().str());
    }

    // Cross-check: the sum of the three conjugate increments minus T reduces
    // to a numerator that must be G up to sign, over 4 T Y1 Y2 Y3 Q Q' Q''.
    {
        auto block = vars.main_block();
        PolyZZ Q2 = sys.Q.cyclic_shift(block);
        PolyZZ Q3 = Q2.cyclic_shift(block);
        PolyZZ P2 = sys.P.cyclic_shift(block);
        PolyZZ P3 = P2.cyclic_shift(block);
        auto mkdelta = [&](const PolyZZ& p, const PolyZZ& q) {
            return RationalZZ::of(p, constant(vars, 4) * T * prodY * q, true);
        };
        RationalZZ total = mkdelta(sys.P, sys.Q)
                               .add(mkdelta(P2, Q2))
                               .add(mkdelta(P3, Q3))
                               .sub(RationalZZ::whole(T))
                               .reduce_structural();
        PolyZZ cross_den = constant(vars, 4) * T * prodY * sys.Q * Q2 * Q3;
        if (!(total.den == cross_den))
            throw DerivationMismatch("conjugate-sum cross-check: unexpected denominator");
        if (total.num == sys.G.neg()) {
            log.push_back(
                "cross-check: numerator of (Delta1+Delta2+Delta3 - T) over 4T Y1 Y2 Y3 Q Q' Q'' "
                "equals -G; equivalently (T - sum) yields +G; residual unit -1 recorded");
        } else if (total.num == sys.G) {
            log.push_back(
                "cross-check: numerator of (Delta1+Delta2+Delta3 - T) equals +G exactly");
        } else {
            throw DerivationMismatch("conjugate-sum cross-check: numerator is not G up to sign");
        }
    }
    return sys;
}

DerivedSystem4 derive_n4() {
    DerivedSystem4 sys;
    sys.xvars = make_varset({"X1", "X2", "X3", "X4"});
    sys.yvars = make_varset({"Y1", "Y2", "Y3", "Y4"});
    const VarSet& xv = sys.xvars;
    auto& log = sys.log;

    std::array<PolyZZ, 4> X = {variable(xv, "X1"), variable(xv, "X2"), variable(xv, "X3"),
                               variable(xv, "X4")};

    // The elimination isolates the principal increment Delta1 from the
    // trace condition sum(Delta_i) = 4 by repeated squaring.  With X_i
    // standing for Delta_i^2, the odd part collapses through:
    //   V = 16 + X1 + X2 - X3 - X4
    //   W = V - 2 X2
    //   U = V^2 + 64 X1 - 64 X2 - 4 X1 X2 - 4 X3 X4
    //   U - 16 Delta1 W = 8 (4 - Delta1) Delta2 Delta3 Delta4,
    // and squaring once more gives Delta1 = A / (32 B).
    PolyZZ V = constant(xv, 16) + X[0] + X[1] - X[2] - X[3];
    PolyZZ W = V - constant(xv, 2) * X[1];
    PolyZZ U = V * V + constant(xv, 64) * X[0] - constant(xv, 64) * X[1] -
               constant(xv, 4) * X[0] * X[1] - constant(xv, 4) * X[2] * X[3];
    sys.A = U * U + constant(xv, 256) * X[0] * W * W -
            constant(xv, 64) * (constant(xv, 16) + X[0]) * X[1] * X[2] * X[3];
    sys.B = U * W - constant(xv, 16) * X[1] * X[2] * X[3];
    log.push_back(fmt(V, "V := 16 + X1 + X2 - X3 - X4"));
    log.push_back(fmt(W, "W := V - 2 X2"));
    log.push_back(fmt(U, "U := V^2 + 64 X1 - 64 X2 - 4 X1 X2 - 4 X3 X4"));
    log.push_back(fmt(sys.A, "A := U^2 + 256 X1 W^2 - 64 (16 + X1) X2 X3 X4"));
    log.push_back(fmt(sys.B, "B := U W - 16 X2 X3 X4"));

    // Normalization pins: constant and X1 coefficients, top X4 power.
    {
        Mono m0 = mono_zero();
        Mono m1 = mono_zero();
        m1[0] = 1;
        Mono a4 = mono_zero();
        a4[3] = 4;
        Mono b3 = mono_zero();
        b3[3] = 3;
        if (sys.A.coeff(m0) != 65536 || sys.A.coeff(m1) != 114688 || sys.A.coeff(a4) != 1)
            throw DerivationMismatch("A: normalization anchors failed");
        if (sys.B.coeff(m0) != 4096 || sys.B.coeff(m1) != 1792 || sys.B.coeff(b3) != -1)
            throw DerivationMismatch("B: normalization anchors failed");
        log.push_back("A anchors: A(0,0,0,0)=65536, [X1]A=114688, [X4^4]A=1");
        log.push_back("B anchors: B(0,0,0,0)=4096, [X1]B=1792, [X4^3]B=-1");
    }

    sys.P = sys.A * sys.A - constant(xv, 1024) * X[0] * sys.B * sys.B;
    log.push_back(fmt(sys.P, "P := A^2 - 1024 X1 B^2"));

    // Q is the cofactor of P in the reduced numerator of sum(Delta_i) - 4,
    // where Delta_i = A_i / (32 B_i) runs over the cyclic shifts.
    {
        auto xblock = sys.xvars.main_block();
        std::array<PolyZZ, 4> Ai = {sys.A, sys.A, sys.A, sys.A};
        std::array<PolyZZ, 4> Bi = {sys.B, sys.B, sys.B, sys.B};
        for (int i = 1; i < 4; ++i) {
            Ai[i] = Ai[i - 1].cyclic_shift(xblock);
            Bi[i] = Bi[i - 1].cyclic_shift(xblock);
        }
        RationalZZ total = RationalZZ::of(Ai[0], constant(xv, 32) * Bi[0], true);
        for (int i = 1; i < 4; ++i)
            total = total.add(RationalZZ::of(Ai[i], constant(xv, 32) * Bi[i], true));
        total = total.sub(RationalZZ::whole(constant(xv, 4))).reduce_structural();
        PolyZZ expected_den = constant(xv, 16) * Bi[0] * Bi[1] * Bi[2] * Bi[3];
        if (!(total.den == expected_den))
            throw DerivationMismatch("trace-sum reduction: expected denominator 16 B1 B2 B3 B4");
        log.push_back(fmt(total.num, "N := reduced numerator of sum(Delta_i) - 4 over 16 B1..B4"));
        try {
            sys.Q = total.num.exact_div(sys.P);
        } catch (const NotDivisible& e) {
            throw DerivationMismatch(std::string("P does not divide the reduced numerator: ") +
                                     e.what());
        }
        Mono m0 = mono_zero();
        Mono m1 = mono_zero();
        m1[0] = 1;
        Mono q5 = mono_zero();
        q5[3] = 5;
        std::ostringstream os;
        os << "Q := N / P: " << sys.Q.nterms() << " terms, constant " << sys.Q.coeff(m0)
           << ", [X1]Q = " << sys.Q.coeff(m1) << ", [X4^5]Q = " << sys.Q.coeff(q5);
        log.push_back(os.str());
    }

    // G and L from the squared-increment substitution X_i -> D_i.
    {
        const VarSet& yv = sys.yvars;
        PolyZZ prodY = variable(yv, "Y1") * variable(yv, "Y2") * variable(yv, "Y3") *
                       variable(yv, "Y4");
        std::vector<std::optional<RationalZZ>> assignment(4);
        for (std::size_t i = 0; i < 4; ++i) assignment[i] = delta_square_expr(yv, i);

        RationalZZ gsub = substitute(sys.P.with_varset(yv), assignment);
        PolyZZ y8 = prodY.pow(8);
        if (!(gsub.den == y8))
            throw DerivationMismatch("P(D): expected denominator (Y1 Y2 Y3 Y4)^8");
        sys.G = gsub.num.divexact_scalar(Integer(65536));
        log.push_back(fmt(sys.G, "G := (Y1 Y2 Y3 Y4)^8 P(D1,D2,D3,D4) / 2^16"));
        log.push_back(
            "G sign: pinned to the degree-46 component (leading coefficient of Y1^16 Y2^8 Y3^8 "
            "is +1); the clearing scale is +2^16, residual unit -1 against the -2^16 convention "
            "recorded");

        RationalZZ lsub = substitute(sys.B.with_varset(yv), assignment);
        PolyZZ y3 = prodY.pow(3);
        if (!(lsub.den == y3))
            throw DerivationMismatch("B(D): expected denominator (Y1 Y2 Y3 Y4)^3");
        sys.L = lsub.num.divexact_scalar(Integer(-16));
        log.push_back(fmt(sys.L, "L := (Y1 Y2 Y3 Y4)^3 B(D1,D2,D3,D4) / (-2^4)"));
    }

    sys.components = sys.G.homogeneous_components();
    {
        std::vector<unsigned> keys;
        for (const auto& [d, c] : sys.components) keys.push_back(d);
        if (keys != std::vector<unsigned>{32, 34, 36, 38, 40, 42, 44, 46})
            throw DerivationMismatch("G: homogeneous component degrees are not {32,...,46}");
        if (!sys.G.is_cyclic()) throw DerivationMismatch("G is not cyclic");
        for (std::size_t v = 0; v < 4; ++v)
            if (sys.G.degree_in(v) != 16)
                throw DerivationMismatch("G: per-variable degree != 16");
        log.push_back("G: cyclic, degree 46, per-variable degree 16, components {32,34,...,46}");
    }
    {
        if (sys.L.degree_main() != 18) throw DerivationMismatch("L degree != 18");
        std::ostringstream os;
        os << "L: degree 18, per-variable degrees [" << sys.L.degree_in(0) << ","
           << sys.L.degree_in(1) << "," << sys.L.degree_in(2) << "," << sys.L.degree_in(3)
           << "], cyclic: " << (sys.L.is_cyclic() ? "yes" : "no (invariant under rho^4 only)");
        log.push_back(os.str());
    }
    return sys;
}

Specialized3 specialize(const DerivedSystem3& sys, u64 p, u64 t) {
    if (!is_prime(p)) throw NotPrime("specialize: modulus is not prime");
    if (t % p == 0) throw ZeroTrace("specialize: the construction divides by 4t, t must be nonzero");
    int ti = sys.vars.index_of("T");
    if (ti < 0) throw Error("specialize: no T variable");
    Specialized3 out;
    out.p = p;
    out.t = t % p;
    auto subst = [&](const PolyZZ& f) {
        return reduce_mod_p(f.substitute_value(std::size_t(ti), Integer(out.t)), p);
    };
    out.P = subst(sys.P);
    out.Q = subst(sys.Q);
    out.G = subst(sys.G);
    return out;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

namespace {

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load_manifest(const fs::path& dir) {
    fs::path mf = dir / "manifest.json";
    if (!fs::exists(mf)) return json::object();
    try {
        return json::parse(read_file(mf));
    } catch (const json::exception&) {
        throw CacheCorrupt("manifest.json is not valid JSON");
    }
}

struct NamedPoly {
    std::string file;
    const PolyZZ* poly;
};

void store_system(const fs::path& dir, const std::string& key,
                  const std::vector<NamedPoly>& polys, const std::vector<std::string>& log) {
    fs::create_directories(dir);
    json manifest;
    try {
        manifest = load_manifest(dir);
    } catch (const CacheCorrupt&) {
        manifest = json::object();  // rebuild a broken manifest on store
    }
    manifest["schema"] = 1;
    json section;
    section["version"] = kDerivationVersion;
    json files = json::object();
    for (const auto& np : polys) {
        std::string text = np.poly->serialize();
        write_file_atomic(dir / np.file, text);
        files[np.file] = {{"sha256", sha256_hex(text)},
                          {"terms", np.poly->nterms()},
                          {"degree", np.poly->degree()},
                          {"degree_main", np.poly->degree_main()}};
    }
    section["files"] = files;
    section["log"] = log;
    manifest["systems"][key] = section;
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

// nullopt when the cache has no usable section; CacheCorrupt when the
// section exists but its contents cannot be trusted.
std::optional<std::vector<std::string>> load_section(const fs::path& dir, const std::string& key,
                                                     const std::vector<std::string>& expect_files,
                                                     std::vector<std::string>& texts) {
    if (!fs::exists(dir / "manifest.json")) return std::nullopt;
    json manifest = load_manifest(dir);
    if (!manifest.contains("systems") || !manifest["systems"].contains(key)) return std::nullopt;
    const json& section = manifest["systems"][key];
    if (!section.contains("version") || section["version"] != kDerivationVersion)
        return std::nullopt;  // stale format: recompute
    if (!section.contains("files")) throw CacheCorrupt("cache section lists no files");
    texts.clear();
    for (const auto& name : expect_files) {
        if (!section["files"].contains(name))
            throw CacheCorrupt("cache manifest missing entry for " + name);
        fs::path fp = dir / name;
        if (!fs::exists(fp)) throw CacheCorrupt("cache file missing: " + name);
        std::string text = read_file(fp);
        std::string want = section["files"][name].value("sha256", "");
        if (sha256_hex(text) != want)
            throw CacheCorrupt("cache file hash mismatch: " + name);
        texts.push_back(std::move(text));
    }
    std::vector<std::string> log;
    if (section.contains("log"))
        for (const auto& e : section["log"]) log.push_back(e.get<std::string>());
    return log;
}

}  // namespace

void cache_store(const DerivedSystem3& sys, const std::string& dir) {
    store_system(dir, "n3",
                 {{"n3_P.poly", &sys.P}, {"n3_Q.poly", &sys.Q}, {"n3_G.poly", &sys.G}}, sys.log);
}

void cache_store(const DerivedSystem4& sys, const std::string& dir) {
    store_system(dir, "n4",
                 {{"n4_A.poly", &sys.A},
                  {"n4_B.poly", &sys.B},
                  {"n4_P.poly", &sys.P},
                  {"n4_Q.poly", &sys.Q},
                  {"n4_G.poly", &sys.G},
                  {"n4_L.poly", &sys.L}},
                 sys.log);
}

std::optional<DerivedSystem3> cache_load_n3(const std::string& dir) {
    std::vector<std::string> texts;
    auto log = load_section(dir, "n3", {"n3_P.poly", "n3_Q.poly", "n3_G.poly"}, texts);
    if (!log) return std::nullopt;
    DerivedSystem3 sys;
    sys.vars = make_varset({"T", "Y1", "Y2", "Y3"}, {"T"});
    ZZRing zz;
    try {
        sys.P = parse_poly(zz, sys.vars, texts[0]);
        sys.Q = parse_poly(zz, sys.vars, texts[1]);
        sys.G = parse_poly(zz, sys.vars, texts[2]);
    } catch (const ParseError& e) {
        throw CacheCorrupt(std::string("cached polynomial unreadable: ") + e.what());
    }
    sys.components = sys.G.homogeneous_components();
    sys.log = *log;
    return sys;
}

std::optional<DerivedSystem4> cache_load_n4(const std::string& dir) {
    std::vector<std::string> texts;
    auto log = load_section(
        dir, "n4",
        {"n4_A.poly", "n4_B.poly", "n4_P.poly", "n4_Q.poly", "n4_G.poly", "n4_L.poly"}, texts);
    if (!log) return std::nullopt;
    DerivedSystem4 sys;
    sys.xvars = make_varset({"X1", "X2", "X3", "X4"});
    sys.yvars = make_varset({"Y1", "Y2", "Y3", "Y4"});
    ZZRing zz;
    try {
        sys.A = parse_poly(zz, sys.xvars, texts[0]);
        sys.B = parse_poly(zz, sys.xvars, texts[1]);
        sys.P = parse_poly(zz, sys.xvars, texts[2]);
        sys.Q = parse_poly(zz, sys.xvars, texts[3]);
        sys.G = parse_poly(zz, sys.yvars, texts[4]);
        sys.L = parse_poly(zz, sys.yvars, texts[5]);
    } catch (const ParseError& e) {
        throw CacheCorrupt(std::string("cached polynomial unreadable: ") + e.what());
    }
    sys.components = sys.G.homogeneous_components();
    sys.log = *log;
    return sys;
}

DerivedSystem3 obtain_n3(const std::string& cache_dir, bool repair) {
    try {
        if (auto sys = cache_load_n3(cache_dir)) return *sys;
    } catch (const CacheCorrupt&) {
        if (!repair) throw;
    }
    DerivedSystem3 sys = derive_n3();
    cache_store(sys, cache_dir);
    return sys;
}

DerivedSystem4 obtain_n4(const std::string& cache_dir, bool repair) {
    try {
        if (auto sys = cache_load_n4(cache_dir)) return *sys;
    } catch (const CacheCorrupt&) {
        if (!repair) throw;
    }
    DerivedSystem4 sys = derive_n4();
    cache_store(sys, cache_dir);
    return sys;
}

}  // namespace permrat
