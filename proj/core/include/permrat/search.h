#pragma once

#include "permrat/derivation.h"
#include "permrat/field.h"

#include <map>
#include <string>
#include <vector>

namespace permrat {

inline constexpr u64 kScanBudget = 10'000'000;    // image / collision / variety scans
inline constexpr u64 kCountBudget = 100'000'000;  // point-count evaluations

// One experiment configuration for f_b(x) = x + 1/(x^p - x + b) on F_{p^n}.
// trace(b) != 0 keeps the denominator nonzero for every x, so f_b is total.
struct ProblemInstance {
    FieldConfig cfg;
    ExtElement b;
    u64 t = 0;  // 2 trace(b) mod p; equals 4 mod p in the quartic b = 1/2 setup
};

// Throws ZeroTrace when trace(b) = 0.
ProblemInstance make_instance(const FieldConfig& cfg, const ExtElement& b);

ExtElement apply_fb(const ProblemInstance& inst, const ExtElement& x);

enum class WitnessMethod { brute, variety };

std::string witness_method_name(WitnessMethod m);

// A collision certificate: y != 0 with f_b(x+y) = f_b(x), together with the
// quadratic data it must satisfy:
//   z = x^p - x + b,   z^2 + (y^p - y) z + 1 - y^{p-1} = 0,
//   delta = 2z + (y^p - y),  delta^2 = (y^p - y)^2 - 4(1 - y^{p-1}),
//   trace(delta) = 2 trace(b).
struct Witness {
    ExtElement x, y, delta, z;
    WitnessMethod method = WitnessMethod::brute;
};

// Checks every Witness invariant; throws ReconstructionFailure naming the
// first violated one.
void validate_witness(const ProblemInstance& inst, const Witness& w);

struct PermutationScan {
    bool is_permutation = false;
    u64 domain = 0;      // p^n
    u64 image_size = 0;  // |f_b(F_{p^n})|
};

// Exhaustive image scan.  Throws BudgetExceeded when p^n > budget.
PermutationScan is_permutation(const ProblemInstance& inst, u64 budget = kScanBudget);

struct ClassEntry {
    ExtElement b;
    u64 trace_class = 0;  // trace(b), nonzero
    bool is_pr = false;
    u64 image_size = 0;
};

struct Classification {
    u64 p = 0;
    int n = 0;
    std::string modulus;                   // field model, "c0,...,c{n-1}"
    u64 seed = 0;                          // RNG seed for the extra samples
    std::vector<ClassEntry> entries;       // transversal first, then random extras
    std::map<u64, bool> verdict_by_trace;  // one verdict per nonzero trace class
    bool consistent_within_class = true;   // every sampled b agreed with its class
};

// Permutation verdict for one b per nonzero trace class plus `extras_per_class`
// random additional b per class.  Throws BudgetExceeded when the total number
// of evaluations would exceed the budget.
Classification classify_all_b(u64 p, int n, int extras_per_class = 2, u64 seed = 1,
                              u64 budget = kScanBudget);

// First collision in enumeration order: smallest x (by element index) whose
// fiber has a partner, then smallest y = x' - x over the partners x'.
// Throws NotFound when f_b is a permutation, BudgetExceeded on p^n > budget.
Witness find_collision_brute(const ProblemInstance& inst, u64 budget = kScanBudget);

// Collision via the eliminated system: scans y in F_{p^n}* (element order)
// for G(y, y^p, y^{p^2}) = 0 with Q(y, y^p, y^{p^2}) != 0, reconstructs
// delta = P / (4t y1 y2 y3 Q), z = (delta - (y^p - y))/2, and solves
// x^p - x = z - b.  Throws NoVarietyPoint when no qualifying y exists
// (expected at small p) and ReconstructionFailure if an asserted identity
// fails (an implementation bug, never expected).
Witness variety_witness(const ProblemInstance& inst, const DerivedSystem3& sys,
                        u64 budget = kScanBudget);

// Quartic analogue, requiring b = 1/2: scans y for G(y, y^p, y^{p^2}, y^{p^3})
// = 0 with all four cyclic denominators B(d), B^rho(d), ... nonzero (d_i the
// conjugate increment squares), reconstructs delta = A(d) / (32 B(d)).
Witness variety_witness(const ProblemInstance& inst, const DerivedSystem4& sys,
                        u64 budget = kScanBudget);

struct CountRecord {
    std::string id;
    u64 p = 0;
    int k = 0;      // number of scanned variables
    u64 count = 0;  // simultaneous zeros of the system in F_p^k
    Integer p_squared;
    // Lower-bound comparison p^2 - (d-1)(d-2) p^{3/2} - 5 d^{13/3} p for an
    // absolutely irreducible surface of degree d; filled when degree != 0.
    unsigned degree = 0;
    Integer bound_coeff;      // (d-1)(d-2)
    std::string bound_lo;     // rational enclosure of the lower bound
    std::string bound_hi;
    bool bound_vacuous = false;  // enclosure entirely below zero
};

// Exact count of common zeros of `system` over F_p^k by exhaustive scan,
// partitioned deterministically across workers (identical result for any
// worker count).  k must equal the main-block size of every polynomial;
// parameter variables must already be eliminated.  Throws BudgetExceeded
// when p^k > budget.
CountRecord count_points(const std::vector<PolyFp>& system, u64 p, int k,
                         const std::string& id, unsigned workers = 0,
                         u64 budget = kCountBudget, unsigned degree = 0);

struct MooreTransformed {
    PolyFp g;       // f((Y) M(z)), coefficients back in F_p
    ExtElement z;   // the normal element used
};

// Substitutes the Moore matrix of the first normal element of cfg into f.
// Throws CoefficientLeak if any coefficient of the image lies outside F_p
// (impossible for cyclic f over F_p; indicates a bug).
MooreTransformed moore_transform(const PolyFp& f, const FieldConfig& cfg);

struct MooreImage {
    PolyExt g;      // f((Y) M(z)) with coefficients in F_{p^n}
    ExtElement z;
};

// Same substitution without the prime-field projection, for polynomials that
// are not cyclic and therefore acquire genuine extension coefficients.
MooreImage moore_transform_ext(const PolyFp& f, const FieldConfig& cfg);

// Count of base-field points a in F_p^k at which every member of `fp_system`
// and every member of `ext_system` vanishes (the latter have extension
// coefficients but are evaluated at base points).  Short-circuits on the
// prime-field system first.  Same partitioning guarantees as count_points.
CountRecord count_points_joint(const std::vector<PolyFp>& fp_system,
                               const std::vector<PolyExt>& ext_system,
                               const FieldConfig& F, int k, const std::string& id,
                               unsigned workers = 0, u64 budget = kCountBudget);

// (d-1)(d-2): the surface-degree coefficient of the p^{3/2} term.
Integer lang_weil_coeff(unsigned d);

struct Threshold {
    unsigned d = 0;
    Integer coeff;         // (d-1)(d-2)
    std::string c_lo;      // rational enclosure of C = 5 d^{13/3} + d^2
    std::string c_hi;
    u64 least_admissible = 0;  // least integer p with p - coeff sqrt(p) - C > 0
    u64 least_prime = 0;       // least prime satisfying the same
    u64 prime_ordinal = 0;     // index of least_prime (prime_index(2) = 1)
    // Both closed-form bracket variants 1/4 [k + sqrt(coeff^2 + 4C)]^2, which
    // differ in reference material; the inequality above is what decides.
    std::string bracket_with_coeff_minus_1;
    std::string bracket_with_coeff;
};

// Solves p - coeff sqrt(p) - C > 0 exactly over the integers, with
// C = 5 d^{13/3} + d^2 enclosed by rationals (d^{13/3} to width < 1e-6),
// via (p - C)^2 > coeff^2 p together with p > C.  Requires d >= 3.
Threshold lang_weil_threshold(unsigned d, const Integer& coeff);

// JSON records, schema 1.
std::string witness_to_json(const ProblemInstance& inst, const Witness& w);
std::string scan_to_json(const ProblemInstance& inst, const PermutationScan& s);
std::string classification_to_json(const Classification& c);
std::string count_to_json(const CountRecord& r);
std::string threshold_to_json(const Threshold& t);

}  // namespace permrat
