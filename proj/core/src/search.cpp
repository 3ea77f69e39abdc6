#include "permrat/search.h"

#include "permrat/parallel.h"
#include "permrat/primes.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace permrat {

namespace {

using Rational = boost::multiprecision::cpp_rational;

Integer rfloor(const Rational& v) {
    return floor_div(numerator(v), denominator(v));
}

std::string decimal_str(const Rational& x, int digits, bool nearest = false) {
    bool neg = x < 0;
    Rational a = neg ? Rational(-x) : x;
    Integer scale = ipow(Integer(10), unsigned(digits));
    Integer scaled = rfloor(a * scale + (nearest ? Rational(1, 2) : Rational(0)));
    Integer ip = scaled / scale, fp = scaled % scale;
    std::string frac = fp.str();
    while (int(frac.size()) < digits) frac.insert(frac.begin(), '0');
    return (neg ? "-" : "") + ip.str() + "." + frac;
}

struct Enc {
    Rational lo, hi;  // lo <= x <= hi
};

// Enclosure of v^{1/k} for rational v >= 1, bisected below width_target.
Enc kth_root_enc(const Rational& v, unsigned k, const Rational& width_target) {
    Integer a = iroot(rfloor(v), k);
    Rational lo(a), hi(a + 1);
    auto powk = [&](const Rational& x) {
        Rational r = 1;
        for (unsigned i = 0; i < k; ++i) r *= x;
        return r;
    };
    while (hi - lo >= width_target) {
        Rational mid = (lo + hi) / 2;
        if (powk(mid) <= v) lo = mid;
        else hi = mid;
    }
    return {lo, hi};
}

// Lexicographic point enumeration: digits[0] is most significant, matching
// element_at / index_of.
bool next_point(std::vector<u64>& digits, u64 p) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < p) return true;
        digits[i] = 0;
    }
    return false;
}

ExtElement zero_of(const FieldConfig& F) { return ExtElement(std::size_t(F.n), 0); }

u64 checked_domain(const FieldConfig& F, u64 budget, const char* who) {
    if (!F.q_fits_u64 || F.q > budget)
        throw BudgetExceeded(std::string(who) + ": p^n exceeds the scan budget");
    return F.q;
}

// (y^p - y)^2 - 4 (1 - y^{p-1}); requires y != 0.
ExtElement delta_square_rhs(const FieldConfig& F, const ExtElement& y) {
    ExtElement w = ext_sub(F, frobenius(F, y), y);
    ExtElement ypm1 = ext_mul(F, frobenius(F, y), ext_inv(F, y));
    return ext_sub(F, ext_mul(F, w, w), ext_scal(F, 4, ext_sub(F, ext_one(F), ypm1)));
}

}  // namespace

ProblemInstance make_instance(const FieldConfig& cfg, const ExtElement& b) {
    u64 tr = trace(cfg, b);
    if (tr == 0) throw ZeroTrace("make_instance: trace(b) = 0");
    return ProblemInstance{cfg, b, addmod(tr, tr, cfg.p)};
}

ExtElement apply_fb(const ProblemInstance& inst, const ExtElement& x) {
    const FieldConfig& F = inst.cfg;
    ExtElement den = ext_add(F, ext_sub(F, frobenius(F, x), x), inst.b);
    return ext_add(F, x, ext_inv(F, den));
}

std::string witness_method_name(WitnessMethod m) {
    return m == WitnessMethod::brute ? "brute" : "variety";
}

void validate_witness(const ProblemInstance& inst, const Witness& w) {
    const FieldConfig& F = inst.cfg;
    if (ext_is_zero(w.y)) throw ReconstructionFailure("witness: y = 0");
    if (!(apply_fb(inst, ext_add(F, w.x, w.y)) == apply_fb(inst, w.x)))
        throw ReconstructionFailure("witness: f_b(x+y) != f_b(x)");
    ExtElement z = ext_add(F, ext_sub(F, frobenius(F, w.x), w.x), inst.b);
    if (!(z == w.z)) throw ReconstructionFailure("witness: z != x^p - x + b");
    ExtElement wy = ext_sub(F, frobenius(F, w.y), w.y);
    ExtElement ypm1 = ext_mul(F, frobenius(F, w.y), ext_inv(F, w.y));
    ExtElement quad = ext_add(F, ext_mul(F, w.z, w.z), ext_mul(F, wy, w.z));
    quad = ext_add(F, quad, ext_sub(F, ext_one(F), ypm1));
    if (!ext_is_zero(quad))
        throw ReconstructionFailure("witness: z^2 + (y^p-y) z + 1 - y^{p-1} != 0");
    if (trace(F, w.delta) != inst.t)
        throw ReconstructionFailure("witness: trace(delta) != 2 trace(b)");
    if (!(ext_mul(F, w.delta, w.delta) == delta_square_rhs(F, w.y)))
        throw ReconstructionFailure("witness: delta^2 != (y^p-y)^2 - 4(1 - y^{p-1})");
}

PermutationScan is_permutation(const ProblemInstance& inst, u64 budget) {
    const FieldConfig& F = inst.cfg;
    u64 q = checked_domain(F, budget, "is_permutation");
    std::vector<bool> seen(q, false);
    u64 image = 0;
    ExtElement x = zero_of(F);
    for (u64 k = 0; k < q; ++k) {
        u64 idx = index_of(F, apply_fb(inst, x));
        if (!seen[idx]) {
            seen[idx] = true;
            ++image;
        }
        next_point(x, F.p);
    }
    return {image == q, q, image};
}

Classification classify_all_b(u64 p, int n, int extras_per_class, u64 seed, u64 budget) {
    FieldConfig F = make_field(p, n);
    u64 q = checked_domain(F, budget, "classify_all_b");
    u64 scans = (p - 1) * u64(1 + std::max(0, extras_per_class));
    if (u128(scans) * q > budget)
        throw BudgetExceeded("classify_all_b: transversal scan exceeds the budget");

    // One representative per nonzero trace class, in element order.
    std::map<u64, ExtElement> reps;
    ExtElement e = zero_of(F);
    for (u64 k = 0; k < q && reps.size() + 1 < p; ++k) {
        u64 c = trace(F, e);
        if (c != 0 && !reps.count(c)) reps.emplace(c, e);
        next_point(e, F.p);
    }

    Classification out;
    out.p = p;
    out.n = n;
    out.modulus = ext_to_string(F.modulus);
    out.seed = seed;
    std::mt19937_64 rng(seed);
    for (const auto& [cls, rep] : reps) {
        std::vector<ExtElement> samples = {rep};
        for (int i = 0; i < extras_per_class; ++i) {
            // rep + (s^p - s) stays in the trace class (additive Hilbert 90).
            ExtElement s = element_at(F, rng() % q);
            samples.push_back(ext_add(F, rep, ext_sub(F, frobenius(F, s), s)));
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            ProblemInstance inst = make_instance(F, samples[i]);
            PermutationScan scan = is_permutation(inst, budget);
            out.entries.push_back({samples[i], cls, scan.is_permutation, scan.image_size});
            if (i == 0) out.verdict_by_trace[cls] = scan.is_permutation;
            else if (scan.is_permutation != out.verdict_by_trace[cls])
                out.consistent_within_class = false;
        }
    }
    return out;
}

Witness find_collision_brute(const ProblemInstance& inst, u64 budget) {
    const FieldConfig& F = inst.cfg;
    u64 q = checked_domain(F, budget, "find_collision_brute");
    if (q > u64(UINT32_MAX))
        throw BudgetExceeded("find_collision_brute: fiber table needs q < 2^32");
    std::vector<std::uint32_t> img(q);
    std::vector<std::uint8_t> fiber(q, 0);
    u64 image = 0;
    ExtElement x = zero_of(F);
    for (u64 k = 0; k < q; ++k) {
        u64 idx = index_of(F, apply_fb(inst, x));
        img[k] = std::uint32_t(idx);
        if (fiber[idx] == 0) ++image;
        if (fiber[idx] < 2) ++fiber[idx];
        next_point(x, F.p);
    }
    if (image == q) throw NotFound("find_collision_brute: f_b is a permutation");

    u64 first = 0;
    while (fiber[img[first]] < 2) ++first;
    ExtElement x0 = element_at(F, first);
    u64 best_y = u64(-1);
    for (u64 k = 0; k < q; ++k) {
        if (k == first || img[k] != img[first]) continue;
        u64 yidx = index_of(F, ext_sub(F, element_at(F, k), x0));
        best_y = std::min(best_y, yidx);
    }
    ExtElement y = element_at(F, best_y);
    ExtElement z = ext_add(F, ext_sub(F, frobenius(F, x0), x0), inst.b);
    ExtElement delta = ext_add(F, ext_scal(F, 2, z), ext_sub(F, frobenius(F, y), y));
    Witness w{x0, y, delta, z, WitnessMethod::brute};
    validate_witness(inst, w);
    return w;
}

namespace {

// Shared tail of the variety reconstruction: delta -> z -> x, all asserted.
Witness finish_variety(const ProblemInstance& inst, const ExtElement& y,
                       const ExtElement& delta) {
    const FieldConfig& F = inst.cfg;
    if (trace(F, delta) != inst.t)
        throw ReconstructionFailure("variety: trace(delta) != 2 trace(b)");
    if (!(ext_mul(F, delta, delta) == delta_square_rhs(F, y)))
        throw ReconstructionFailure("variety: delta^2 != (y^p-y)^2 - 4(1 - y^{p-1})");
    ExtElement w = ext_sub(F, frobenius(F, y), y);
    ExtElement inv2 = ext_inv(F, ext_from_u64(F, 2));
    ExtElement z = ext_mul(F, ext_sub(F, delta, w), inv2);
    ExtElement c = ext_sub(F, z, inst.b);
    if (trace(F, c) != 0) throw ReconstructionFailure("variety: trace(z - b) != 0");
    ExtElement x = artin_schreier_solve(F, c);
    Witness out{x, y, delta, z, WitnessMethod::variety};
    validate_witness(inst, out);
    return out;
}

}  // namespace

Witness variety_witness(const ProblemInstance& inst, const DerivedSystem3& sys, u64 budget) {
    const FieldConfig& F = inst.cfg;
    if (F.n != 3) throw Error("variety_witness: instance field is not cubic");
    if (F.p == 2) throw Error("variety_witness: requires odd p");
    u64 q = checked_domain(F, budget, "variety_witness");
    Specialized3 sp = specialize(sys, F.p, inst.t);

    const VarSet& vars = sys.vars;
    std::vector<ExtElement> point(vars.size(), zero_of(F));
    std::size_t iT = std::size_t(vars.index_of("T"));
    std::size_t i1 = std::size_t(vars.index_of("Y1"));
    std::size_t i2 = std::size_t(vars.index_of("Y2"));
    std::size_t i3 = std::size_t(vars.index_of("Y3"));
    point[iT] = ext_from_u64(F, inst.t);
    u64 scale = mulmod(4 % F.p, inst.t, F.p);

    for (u64 k = 1; k < q; ++k) {
        ExtElement y = element_at(F, k);
        point[i1] = y;
        point[i2] = frobenius(F, y);
        point[i3] = frobenius(F, point[i2]);
        if (!ext_is_zero(evaluate(sp.G, F, point))) continue;
        ExtElement qv = evaluate(sp.Q, F, point);
        if (ext_is_zero(qv)) continue;
        ExtElement pv = evaluate(sp.P, F, point);
        ExtElement den = ext_mul(F, point[i1], ext_mul(F, point[i2], point[i3]));
        den = ext_mul(F, ext_scal(F, scale, den), qv);
        ExtElement delta = ext_mul(F, pv, ext_inv(F, den));
        return finish_variety(inst, y, delta);
    }
    throw NoVarietyPoint("variety_witness: no y with G = 0 and Q != 0 in F_" +
                         std::to_string(F.p) + "^3");
}

Witness variety_witness(const ProblemInstance& inst, const DerivedSystem4& sys, u64 budget) {
    const FieldConfig& F = inst.cfg;
    if (F.n != 4) throw Error("variety_witness: instance field is not quartic");
    if (F.p == 2) throw Error("variety_witness: requires odd p");
    ExtElement half = ext_inv(F, ext_from_u64(F, 2));
    if (!(inst.b == half))
        throw Error("variety_witness: quartic path requires b = 1/2");
    u64 q = checked_domain(F, budget, "variety_witness");

    PolyFp Gp = reduce_mod_p(sys.G, F.p);
    PolyFp Lp = reduce_mod_p(sys.L, F.p);
    PolyFp Ap = reduce_mod_p(sys.A, F.p);
    PolyFp Bp = reduce_mod_p(sys.B, F.p);
    u64 inv32 = invmod(32 % F.p, F.p);

    std::vector<ExtElement> yv(4), dv(4), rot(4);
    for (u64 k = 1; k < q; ++k) {
        yv[0] = element_at(F, k);
        for (int i = 1; i < 4; ++i) yv[i] = frobenius(F, yv[i - 1]);
        if (!ext_is_zero(evaluate(Gp, F, yv))) continue;

        // d_i = (y_i - y_{i+1})^2 - 4 + 4 y_{i+1} / y_i, indices cyclic.
        for (int i = 0; i < 4; ++i) {
            const ExtElement& a = yv[i];
            const ExtElement& b2 = yv[(i + 1) % 4];
            ExtElement diff = ext_sub(F, a, b2);
            ExtElement v = ext_sub(F, ext_mul(F, diff, diff), ext_from_u64(F, 4));
            dv[i] = ext_add(F, v, ext_scal(F, 4, ext_mul(F, b2, ext_inv(F, a))));
        }
        bool ok = true;
        ExtElement b0 = zero_of(F);
        for (int r = 0; r < 4 && ok; ++r) {
            for (int i = 0; i < 4; ++i) rot[i] = dv[(i + r) % 4];
            ExtElement bv = evaluate(Bp, F, rot);
            if (r == 0) b0 = bv;
            if (ext_is_zero(bv)) ok = false;
        }
        if (!ok) continue;
        // (y1 y2 y3 y4)^3 B(d) = -16 L(y), so B(d) != 0 forces L(y) != 0.
        if (ext_is_zero(evaluate(Lp, F, yv)))
            throw ReconstructionFailure("variety: B(d) != 0 but L(y) = 0");

        ExtElement av = evaluate(Ap, F, dv);
        ExtElement delta = ext_scal(F, inv32, ext_mul(F, av, ext_inv(F, b0)));
        return finish_variety(inst, yv[0], delta);
    }
    throw NoVarietyPoint("variety_witness: no y with G = 0 and all B-denominators != 0 in F_" +
                         std::to_string(F.p) + "^4");
}

namespace {

// Main-block exponent tables for fast base-field evaluation.
struct FlatSystem {
    struct FlatPoly {
        std::vector<u64> coeffs;
        std::vector<std::vector<unsigned>> exps;  // [term][scan var]
    };
    std::size_t k = 0;
    std::vector<unsigned> maxdeg;
    std::vector<FlatPoly> polys;

    FlatSystem(const std::vector<PolyFp>& system, const std::vector<std::size_t>& block)
        : k(block.size()), maxdeg(block.size(), 0), polys(system.size()) {
        for (std::size_t s = 0; s < system.size(); ++s) {
            for (const auto& t : system[s].terms()) {
                polys[s].coeffs.push_back(t.c);
                std::vector<unsigned> row(k, 0);
                for (std::size_t i = 0; i < k; ++i) {
                    row[i] = t.m[block[i]];
                    maxdeg[i] = std::max(maxdeg[i], row[i]);
                }
                polys[s].exps.push_back(std::move(row));
            }
        }
    }

    bool all_vanish(const std::vector<u64>& a, std::vector<std::vector<u64>>& pw,
                    u64 p) const {
        for (std::size_t i = 0; i < k; ++i) {
            auto& row = pw[i];
            row.assign(1, 1 % p);
            for (unsigned e = 1; e <= maxdeg[i]; ++e)
                row.push_back(mulmod(row.back(), a[i], p));
        }
        for (const auto& f : polys) {
            u64 val = 0;
            for (std::size_t t = 0; t < f.coeffs.size(); ++t) {
                u64 term = f.coeffs[t];
                for (std::size_t i = 0; i < k; ++i)
                    term = mulmod(term, pw[i][f.exps[t][i]], p);
                val = addmod(val, term, p);
            }
            if (val != 0) return false;
        }
        return true;
    }
};

template <class Poly>
void check_scan_vars(const Poly& f, const VarSet& vars, int k, const char* who) {
    if (f.vars() != vars) throw DomainMismatch(std::string(who) + ": mixed variable sets");
    if (int(vars.main_block().size()) != k)
        throw DomainMismatch(std::string(who) + ": k != number of scan variables");
    for (std::size_t v = 0; v < vars.size(); ++v)
        if (vars.is_param(v) && f.degree_in(v) > 0)
            throw DomainMismatch(std::string(who) + ": parameter variable not eliminated");
}

u64 checked_point_total(u64 p, int k, u64 budget, const char* who) {
    u128 total = 1;
    for (int i = 0; i < k; ++i) {
        total *= p;
        if (total > budget) throw BudgetExceeded(std::string(who) + ": p^k exceeds the budget");
    }
    return u64(total);
}

// Deterministic chunked scan shared by both counters: visit(a, pw) for each
// point, partial sums merged in chunk order.
u64 chunked_count(u64 p, std::size_t k, u64 total, unsigned workers,
                  const std::function<bool(const std::vector<u64>&,
                                           std::vector<std::vector<u64>>&)>& pred) {
    unsigned w = workers ? workers : worker_count();
    w = unsigned(std::min<u64>(w, std::max<u64>(total, 1)));
    std::vector<u64> partial(w, 0);
    u64 chunk = (total + w - 1) / w;
    parallel_for(
        w,
        [&](std::size_t wi) {
            u64 lo = u64(wi) * chunk, hi = std::min(total, lo + chunk);
            if (lo >= hi) return;
            std::vector<u64> a(k, 0);
            u64 rem = lo;
            for (std::size_t i = k; i-- > 0;) {
                a[i] = rem % p;
                rem /= p;
            }
            std::vector<std::vector<u64>> pw(k);
            u64 cnt = 0;
            for (u64 idx = lo; idx < hi; ++idx) {
                if (pred(a, pw)) ++cnt;
                next_point(a, p);
            }
            partial[wi] = cnt;
        },
        w);
    u64 count = 0;
    for (u64 c : partial) count += c;
    return count;
}

}  // namespace

CountRecord count_points(const std::vector<PolyFp>& system, u64 p, int k,
                         const std::string& id, unsigned workers, u64 budget,
                         unsigned degree) {
    if (system.empty()) throw Error("count_points: empty system");
    if (!is_prime(p)) throw NotPrime("count_points: p is not prime");
    const VarSet& vars = system[0].vars();
    for (const auto& f : system) check_scan_vars(f, vars, k, "count_points");
    u64 total = checked_point_total(p, k, budget, "count_points");

    FlatSystem flat(system, vars.main_block());
    CountRecord rec;
    rec.id = id;
    rec.p = p;
    rec.k = k;
    rec.count = chunked_count(p, std::size_t(k), total, workers,
                              [&](const std::vector<u64>& a,
                                  std::vector<std::vector<u64>>& pw) {
                                  return flat.all_vanish(a, pw, p);
                              });
    rec.p_squared = Integer(p) * Integer(p);
    if (degree != 0) {
        Rational width(1, 1'000'000);
        Enc u13 = kth_root_enc(Rational(ipow(Integer(degree), 13)), 3, width);
        Enc p32 = kth_root_enc(Rational(ipow(Integer(p), 3)), 2, width);
        rec.degree = degree;
        rec.bound_coeff = lang_weil_coeff(degree);
        Rational lo = Rational(rec.p_squared) - Rational(rec.bound_coeff) * p32.hi -
                      5 * u13.hi * Integer(p);
        Rational hi = Rational(rec.p_squared) - Rational(rec.bound_coeff) * p32.lo -
                      5 * u13.lo * Integer(p);
        rec.bound_lo = decimal_str(lo, 3);
        rec.bound_hi = decimal_str(hi, 3);
        rec.bound_vacuous = hi <= 0;
    }
    return rec;
}

CountRecord count_points_joint(const std::vector<PolyFp>& fp_system,
                               const std::vector<PolyExt>& ext_system,
                               const FieldConfig& F, int k, const std::string& id,
                               unsigned workers, u64 budget) {
    if (fp_system.empty() && ext_system.empty())
        throw Error("count_points_joint: empty system");
    const VarSet& vars = fp_system.empty() ? ext_system[0].vars() : fp_system[0].vars();
    for (const auto& f : fp_system) check_scan_vars(f, vars, k, "count_points_joint");
    for (const auto& f : ext_system) check_scan_vars(f, vars, k, "count_points_joint");
    u64 p = F.p;
    u64 total = checked_point_total(p, k, budget, "count_points_joint");

    FlatSystem flat(fp_system, vars.main_block());
    auto block = vars.main_block();
    CountRecord rec;
    rec.id = id;
    rec.p = p;
    rec.k = k;
    rec.count = chunked_count(
        p, std::size_t(k), total, workers,
        [&](const std::vector<u64>& a, std::vector<std::vector<u64>>& pw) {
            if (!flat.all_vanish(a, pw, p)) return false;
            if (ext_system.empty()) return true;
            std::vector<ExtElement> point(vars.size(), zero_of(F));
            for (std::size_t i = 0; i < block.size(); ++i)
                point[block[i]] = ext_from_u64(F, a[i]);
            for (const auto& g : ext_system)
                if (!ext_is_zero(evaluate(g, point))) return false;
            return true;
        });
    rec.p_squared = Integer(p) * Integer(p);
    return rec;
}

MooreTransformed moore_transform(const PolyFp& f, const FieldConfig& cfg) {
    ExtElement z = find_normal_element(cfg);
    MooreMatrix M = moore_matrix(cfg, z);
    PolyExt g = substitute_linear(f, cfg, M.entries);
    auto back = try_to_prime_field(g);
    if (!back)
        throw CoefficientLeak("moore_transform: image has a coefficient outside F_p");
    if (f.is_cyclic() && !back->is_cyclic())
        throw Error("moore_transform: cyclicity lost, which contradicts the Moore lemma");
    return {*back, z};
}

MooreImage moore_transform_ext(const PolyFp& f, const FieldConfig& cfg) {
    ExtElement z = find_normal_element(cfg);
    MooreMatrix M = moore_matrix(cfg, z);
    return {substitute_linear(f, cfg, M.entries), z};
}

Integer lang_weil_coeff(unsigned d) {
    return Integer(d - 1) * Integer(d - 2);
}

Threshold lang_weil_threshold(unsigned d, const Integer& coeff) {
    if (d < 3) throw DegreeOutOfRange("lang_weil_threshold: requires d >= 3");
    const Integer d13 = ipow(Integer(d), 13);
    const Integer c2 = coeff * coeff;
    Rational width(1, 1'000'000);
    Enc u = kth_root_enc(Rational(d13), 3, width);
    Enc C{5 * u.lo + Integer(d) * Integer(d), 5 * u.hi + Integer(d) * Integer(d)};

    // p - coeff sqrt(p) - C > 0  <=>  p > C and (p - C)^2 > coeff^2 p.
    // Decided against the enclosure; refined further if ever indecisive.
    auto admissible = [&](u64 pp) {
        Rational P(pp);
        for (;;) {
            if (P > C.hi && (P - C.hi) * (P - C.hi) > Rational(c2) * P) return true;
            if (!(P > C.lo) || !((P - C.lo) * (P - C.lo) > Rational(c2) * P)) return false;
            width /= 2;
            u = kth_root_enc(Rational(d13), 3, width);
            C = {5 * u.lo + Integer(d) * Integer(d), 5 * u.hi + Integer(d) * Integer(d)};
        }
    };

    u64 lo = u64(rfloor(C.lo));  // p <= C is never admissible
    u64 hi = std::max<u64>(lo + 1, 2);
    while (!admissible(hi)) hi *= 2;
    while (hi - lo > 1) {
        u64 mid = lo + (hi - lo) / 2;
        (admissible(mid) ? hi : lo) = mid;
    }

    Threshold t;
    t.d = d;
    t.coeff = coeff;
    t.c_lo = decimal_str(C.lo, 6);
    t.c_hi = decimal_str(C.hi, 6);
    t.least_admissible = hi;
    t.least_prime = next_prime(hi);
    t.prime_ordinal = prime_index(t.least_prime);

    Rational bw(1, 1'000'000);
    Enc s{kth_root_enc(Rational(c2) + 4 * C.lo, 2, bw).lo,
          kth_root_enc(Rational(c2) + 4 * C.hi, 2, bw).hi};
    auto bracket = [&](const Integer& kk) {
        Rational blo = (kk + s.lo) * (kk + s.lo) / 4;
        Rational bhi = (kk + s.hi) * (kk + s.hi) / 4;
        return decimal_str((blo + bhi) / 2, 2, /*nearest=*/true);
    };
    t.bracket_with_coeff_minus_1 = bracket(coeff - 1);
    t.bracket_with_coeff = bracket(coeff);
    return t;
}

// ---------------------------------------------------------------------------
// JSON records
// ---------------------------------------------------------------------------

namespace {

nlohmann::json instance_json(const ProblemInstance& inst) {
    return {{"p", inst.cfg.p},
            {"n", inst.cfg.n},
            {"modulus", ext_to_string(inst.cfg.modulus)},
            {"b", ext_to_string(inst.b)},
            {"t", inst.t}};
}

}  // namespace

std::string witness_to_json(const ProblemInstance& inst, const Witness& w) {
    nlohmann::json j = instance_json(inst);
    j["schema"] = 1;
    j["record"] = "witness";
    j["method"] = witness_method_name(w.method);
    j["x"] = ext_to_string(w.x);
    j["y"] = ext_to_string(w.y);
    j["delta"] = ext_to_string(w.delta);
    j["z"] = ext_to_string(w.z);
    return j.dump(2);
}

std::string scan_to_json(const ProblemInstance& inst, const PermutationScan& s) {
    nlohmann::json j = instance_json(inst);
    j["schema"] = 1;
    j["record"] = "permutation_scan";
    j["domain"] = s.domain;
    j["image_size"] = s.image_size;
    j["is_permutation"] = s.is_permutation;
    return j.dump(2);
}

std::string classification_to_json(const Classification& c) {
    nlohmann::json j;
    j["schema"] = 1;
    j["record"] = "classification";
    j["p"] = c.p;
    j["n"] = c.n;
    j["modulus"] = c.modulus;
    j["seed"] = c.seed;
    j["consistent_within_class"] = c.consistent_within_class;
    j["classes"] = nlohmann::json::array();
    for (const auto& [cls, verdict] : c.verdict_by_trace)
        j["classes"].push_back({{"trace", cls}, {"is_permutation", verdict}});
    j["entries"] = nlohmann::json::array();
    for (const auto& e : c.entries)
        j["entries"].push_back({{"b", ext_to_string(e.b)},
                                {"trace", e.trace_class},
                                {"is_permutation", e.is_pr},
                                {"image_size", e.image_size}});
    return j.dump(2);
}

std::string count_to_json(const CountRecord& r) {
    nlohmann::json j;
    j["schema"] = 1;
    j["record"] = "count";
    j["id"] = r.id;
    j["p"] = r.p;
    j["k"] = r.k;
    j["count"] = r.count;
    j["p_squared"] = r.p_squared.str();
    if (r.degree != 0) {
        j["degree"] = r.degree;
        j["bound_coeff"] = r.bound_coeff.str();
        j["bound_lo"] = r.bound_lo;
        j["bound_hi"] = r.bound_hi;
        j["bound_vacuous"] = r.bound_vacuous;
    }
    return j.dump(2);
}

std::string threshold_to_json(const Threshold& t) {
    nlohmann::json j;
    j["schema"] = 1;
    j["record"] = "threshold";
    j["d"] = t.d;
    j["coeff"] = t.coeff.str();
    j["c_lo"] = t.c_lo;
    j["c_hi"] = t.c_hi;
    j["least_admissible"] = t.least_admissible;
    j["least_prime"] = t.least_prime;
    j["prime_ordinal"] = t.prime_ordinal;
    j["bracket_with_coeff_minus_1"] = t.bracket_with_coeff_minus_1;
    j["bracket_with_coeff"] = t.bracket_with_coeff;
    return j.dump(2);
}

}  // namespace permrat
