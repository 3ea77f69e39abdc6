#pragma once

#include "permrat/mpoly.h"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace permrat {

// Bumped whenever the derivation pipeline changes in a way that invalidates
// cached artifacts.
inline constexpr const char* kDerivationVersion = "1";

// Rational expression D_i over the cyclic main block (Y_1, ..., Y_m):
//
//   D_i = Y_i^2 + Y_j^2 - 2 Y_i Y_j - 4 + 4 Y_j / Y_i,   j = i+1 (mod m),
//
// held with denominator exactly Y_i.  These are the squares of the
// conjugated increments that the elimination removes.
RationalZZ delta_square_expr(const VarSet& vars, std::size_t i);

// Output of the cubic-extension elimination: polynomials in (T, Y1, Y2, Y3)
// with T a parameter.  Delta_1 = P / (4T Y1 Y2 Y3 Q) in lowest terms, and
// G / (16 T^2 (Y1 Y2 Y3)^2 Q^2) is Delta_1^2 - D_1.
struct DerivedSystem3 {
    VarSet vars;  // T Y1 Y2 Y3, with T flagged as parameter
    PolyZZ P, Q, G;
    std::map<unsigned, PolyZZ> components;  // G by Y-degree: 12, 14, 16, 18
    std::vector<std::string> log;
};

// Output of the quartic-extension elimination: A, B, P, Q in (X1..X4) with
// X_i standing for the i-th squared increment, and G, L in (Y1..Y4):
//   Delta_1 = A / (32 B),   P = A^2 - 1024 X1 B^2,
//   (Y1..Y4)^8 P(D) = 2^16 G,   (Y1..Y4)^3 B(D) = -2^4 L.
struct DerivedSystem4 {
    VarSet xvars;  // X1 X2 X3 X4
    VarSet yvars;  // Y1 Y2 Y3 Y4
    PolyZZ A, B, P, Q;
    PolyZZ G, L;
    std::map<unsigned, PolyZZ> components;  // G by degree: 32, 34, ..., 46
    std::vector<std::string> log;
};

DerivedSystem3 derive_n3();
DerivedSystem4 derive_n4();

// T |-> t and coefficients mod p.  Throws ZeroTrace when t == 0 (mod p):
// the construction divides by 4t.
struct Specialized3 {
    u64 p = 0;
    u64 t = 0;
    PolyFp P, Q, G;
};
Specialized3 specialize(const DerivedSystem3& sys, u64 p, u64 t);

// Disk cache: one canonical .poly file per polynomial plus manifest.json
// with SHA-256 hashes, term counts and degrees.  Loading verifies hashes and
// throws CacheCorrupt on any mismatch; a missing or version-stale cache
// reads as std::nullopt.
void cache_store(const DerivedSystem3& sys, const std::string& dir);
void cache_store(const DerivedSystem4& sys, const std::string& dir);
std::optional<DerivedSystem3> cache_load_n3(const std::string& dir);
std::optional<DerivedSystem4> cache_load_n4(const std::string& dir);

// Load from cache when present and valid, otherwise derive and store.
// Invalid caches surface as CacheCorrupt unless `repair` is set, in which
// case they are rebuilt in place.
DerivedSystem3 obtain_n3(const std::string& cache_dir, bool repair = false);
DerivedSystem4 obtain_n4(const std::string& cache_dir, bool repair = false);

}  // namespace permrat
