#pragma once

#include "permrat/derivation.h"
#include "permrat/field.h"

#include <map>
#include <string>
#include <vector>

namespace permrat {

enum class CheckStatus { pass, fail, warn };

std::string status_name(CheckStatus s);

// One verified identity.  `expected`/`actual` hold canonical text excerpts
// when the check compares concrete values; a failing check records the first
// differing term (or a counterexample) in `actual`.  `details` carries notes,
// e.g. recorded residual units or known reference-constant discrepancies.
struct CheckResult {
    std::string id;
    CheckStatus status = CheckStatus::pass;
    std::string expected;
    std::string actual;
    std::string details;
    double ms = 0.0;
};

struct Report {
    std::vector<CheckResult> checks;       // ordered by check id
    std::map<std::string, std::string> environment;  // versions, hashes, parameters
    u64 seed = 0;                          // RNG seed for randomized suites

    bool passed() const;                   // true iff no check failed (warns allowed)
    std::string verdict() const;           // "pass" or "fail"
};

// JSON serialization, schema 1: header {schema, verdict, seed, environment}
// plus one {check_id, status, expected, actual, details, ms} entry per check.
std::string report_to_json(const Report& r);

// Checks the cubic-extension system against its embedded reference anchors:
// component structure, the fully-known degree-18 component, leading-term
// anchors of P, Q and the component cofactors, the elimination chain over the
// conjugate increments, Res(G,Q;Y3) nonvanishing and divisibility signature,
// the Y3^8-coefficient factorization, and the discriminant/remainder
// identities behind its irreducibility argument.
Report verify_n3(const DerivedSystem3& sys);

// Quartic-extension analogue: structure and tilde-invariance, the fully-known
// degree-46 component, anchors of A, B, P, Q, L and the component cofactors,
// defining relations (P = A^2 - 1024 X1 B^2, the denominator clearings, the
// trace-sum cofactor), the elimination chain, Res(G,L) and the squarefreeness
// resultant of the degree-32 component, the diagonal specialization
// G(Y1,Y2,Y1,Y2), and the alpha/beta discriminants.
Report verify_n4(const DerivedSystem4& sys);

// Randomized property suite for the Moore-substitution lemma: for random
// normal z and random cyclic f over F_p, g = f((Y)M(z)) is cyclic with F_p
// coefficients, and the inverse substitution (through M(z)^{-1} = M(w))
// recovers f.  n = 1 is vacuous.
Report verify_lemma21(u64 p, int n, int trials, u64 seed);

// Randomized check of the difference quotient
//   f_b(x+y) - f_b(x) = y (z^2 + (y^p-y) z + 1 - y^{p-1}) / (z(x) z(x+y)),
// plus the square-root construction of z from the quadratic it satisfies.
// Requires trace(b) != 0 (throws ZeroTrace otherwise).
Report verify_difference_identity(u64 p, int n, const ExtElement& b, int trials, u64 seed);

}  // namespace permrat
