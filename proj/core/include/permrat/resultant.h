#pragma once

#include "permrat/mpoly.h"

#include <cstdint>
#include <vector>

namespace permrat {

// Coefficient of v^e in f, as a polynomial with the v-exponent cleared.
template <class R>
SparsePoly<R> coeff_in_var(const SparsePoly<R>& f, std::size_t v, unsigned e) {
    std::vector<typename SparsePoly<R>::Term> terms;
    for (const auto& t : f.terms()) {
        if (t.m[v] != e) continue;
        Mono m = t.m;
        m[v] = 0;
        terms.push_back({m, t.c});
    }
    return SparsePoly<R>::from_terms(f.ring(), f.vars(), std::move(terms));
}

// Sylvester matrix of (f, g) with respect to v, entries being coefficient
// polynomials in the remaining variables.  Size (deg_v f + deg_v g).
template <class R>
std::vector<std::vector<SparsePoly<R>>> sylvester_matrix(const SparsePoly<R>& f,
                                                         const SparsePoly<R>& g, std::size_t v) {
    unsigned m = f.degree_in(v), n = g.degree_in(v);
    std::size_t size = m + n;
    const auto& ring = f.ring();
    const auto& vars = f.vars();
    std::vector<SparsePoly<R>> fc(m + 1, SparsePoly<R>(ring, vars));
    std::vector<SparsePoly<R>> gc(n + 1, SparsePoly<R>(ring, vars));
    for (unsigned i = 0; i <= m; ++i) fc[i] = coeff_in_var(f, v, i);
    for (unsigned i = 0; i <= n; ++i) gc[i] = coeff_in_var(g, v, i);
    std::vector<std::vector<SparsePoly<R>>> M(size,
                                              std::vector<SparsePoly<R>>(size, SparsePoly<R>(ring, vars)));
    for (unsigned r = 0; r < n; ++r)
        for (unsigned i = 0; i <= m; ++i) M[r][r + (m - i)] = fc[i];
    for (unsigned r = 0; r < m; ++r)
        for (unsigned i = 0; i <= n; ++i) M[n + r][r + (n - i)] = gc[i];
    return M;
}

// Determinant by fraction-free Bareiss elimination.  Entries may live in any
// integral domain with exact division; every interior division is exact.
template <class R>
SparsePoly<R> bareiss_determinant(std::vector<std::vector<SparsePoly<R>>> M, R ring,
                                  const VarSet& vars) {
    std::size_t n = M.size();
    auto one = SparsePoly<R>::constant(ring, vars, ring.one());
    if (n == 0) return one;
    SparsePoly<R> prev = one;
    bool negate = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M[k][k].is_zero()) {
            std::size_t piv = k + 1;
            while (piv < n && M[piv][k].is_zero()) ++piv;
            if (piv == n) return SparsePoly<R>(ring, vars);
            std::swap(M[k], M[piv]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                auto num = M[k][k].mul(M[i][j]).sub(M[i][k].mul(M[k][j]));
                M[i][j] = num.exact_div(prev);
            }
            M[i][k] = SparsePoly<R>(ring, vars);
        }
        prev = M[k][k];
    }
    return negate ? M[n - 1][n - 1].neg() : M[n - 1][n - 1];
}

// Resultant by direct Sylvester determinant with fraction-free elimination.
// Exact for any size but only practical on small instances; serves as the
// cross-check oracle for the interpolation path.
template <class R>
SparsePoly<R> resultant_bareiss(const SparsePoly<R>& f, const SparsePoly<R>& g, std::size_t v) {
    if (f.is_zero() || g.is_zero()) return SparsePoly<R>(f.ring(), f.vars());
    auto M = sylvester_matrix(f, g, v);
    return bareiss_determinant(std::move(M), f.ring(), f.vars());
}

// Production resultant over integer coefficients: evaluates the Sylvester
// determinant on an integer grid (per-variable degree bounds from the
// matrix structure), reconstructs each value by CRT over word-size primes,
// then interpolates dimension by dimension.  Spot checks the result against
// direct determinant evaluations at off-grid points before returning.
PolyZZ resultant(const PolyZZ& f, const PolyZZ& g, std::size_t v);

inline PolyFp resultant(const PolyFp& f, const PolyFp& g, std::size_t v) {
    return resultant_bareiss(f, g, v);
}

// (-1)^{d(d-1)/2} * Res(f, df/dv; v) / lc_v(f) with d = deg_v f.
PolyZZ discriminant(const PolyZZ& f, std::size_t v);

template <class R>
SparsePoly<R> discriminant_bareiss(const SparsePoly<R>& f, std::size_t v) {
    unsigned d = f.degree_in(v);
    if (d < 1) throw Error("discriminant: polynomial constant in the chosen variable");
    auto res = resultant_bareiss(f, f.derivative(v), v);
    auto q = res.exact_div(coeff_in_var(f, v, d));
    return (std::uint64_t(d) * (d - 1) / 2) % 2 ? q.neg() : q;
}

}  // namespace permrat
