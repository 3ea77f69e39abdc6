#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permrat/fp64.h"

namespace permrat {

// F_{p^n} with a fixed monic irreducible modulus x^n + c_{n-1}x^{n-1} + ... + c_0.
// The modulus is the smallest irreducible one when the coefficient tuple
// (c_0, ..., c_{n-1}) is read as a base-p integer with c_{n-1} most significant,
// so every run (and every conforming implementation) picks the same field model.
struct FieldConfig {
    u64 p = 0;
    int n = 0;
    std::vector<u64> modulus;  // c_0 .. c_{n-1}

    // frob[i] = coordinates of (x^i)^p, row-major n x n.
    std::vector<std::vector<u64>> frob;

    bool q_fits_u64 = false;
    u64 q = 0;  // p^n when it fits in 64 bits

    bool operator==(const FieldConfig& o) const {
        return p == o.p && n == o.n && modulus == o.modulus;
    }
};

// Elements are coordinate vectors in the polynomial basis 1, x, ..., x^{n-1}.
using ExtElement = std::vector<u64>;

FieldConfig make_field(u64 p, int n);

ExtElement ext_zero(const FieldConfig& cfg);
ExtElement ext_one(const FieldConfig& cfg);
ExtElement ext_from_u64(const FieldConfig& cfg, u64 v);  // embeds F_p
bool ext_is_zero(const ExtElement& a);

ExtElement ext_add(const FieldConfig& cfg, const ExtElement& a, const ExtElement& b);
ExtElement ext_sub(const FieldConfig& cfg, const ExtElement& a, const ExtElement& b);
ExtElement ext_neg(const FieldConfig& cfg, const ExtElement& a);
ExtElement ext_scal(const FieldConfig& cfg, u64 k, const ExtElement& a);
ExtElement ext_mul(const FieldConfig& cfg, const ExtElement& a, const ExtElement& b);
ExtElement ext_pow(const FieldConfig& cfg, ExtElement a, u64 e);
ExtElement ext_inv(const FieldConfig& cfg, const ExtElement& a);  // NotInvertible on 0

ExtElement frobenius(const FieldConfig& cfg, const ExtElement& a);
u64 trace(const FieldConfig& cfg, const ExtElement& a);

// Deterministic enumeration: index k in [0, p^n) maps to the coordinate vector
// whose digits, c_0 most significant, spell k in base p. This is lexicographic
// order on (c_0, ..., c_{n-1}).
ExtElement element_at(const FieldConfig& cfg, u64 k);
u64 index_of(const FieldConfig& cfg, const ExtElement& a);

std::string ext_to_string(const ExtElement& a);                       // "c0,c1,...,c{n-1}"
ExtElement ext_parse(const FieldConfig& cfg, const std::string& s);   // ParseError on junk

struct MooreMatrix {
    ExtElement generator;
    std::vector<std::vector<ExtElement>> entries;  // (i,j) -> z^{p^{(i+j) mod n}}
    ExtElement det;
    bool invertible = false;
    std::vector<std::vector<ExtElement>> inverse;  // valid when invertible
    std::optional<ExtElement> w;                   // inverse == MooreMatrix(w).entries
};

MooreMatrix moore_matrix(const FieldConfig& cfg, const ExtElement& z);

// First z in enumeration order with invertible Moore matrix.
ExtElement find_normal_element(const FieldConfig& cfg);

// One solution of x^p - x = c (canonical: coordinate c_0 == 0); the full
// solution set is x + F_p. Throws NoSolution when trace(c) != 0.
ExtElement artin_schreier_solve(const FieldConfig& cfg, const ExtElement& c);

// Generic n x n linear algebra over F_{p^n}, used by Moore matrices and tests.
ExtElement ext_matrix_det(const FieldConfig& cfg, std::vector<std::vector<ExtElement>> m);
std::optional<std::vector<std::vector<ExtElement>>> ext_matrix_inverse(
    const FieldConfig& cfg, std::vector<std::vector<ExtElement>> m);

}  // namespace permrat
