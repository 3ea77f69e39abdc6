#include "permrat/resultant.h"

#include "permrat/parallel.h"
#include "permrat/primes.h"

#include <atomic>
#include <mutex>
#include <random>

namespace permrat {

namespace {

// Shared descending list of CRT primes just below 2^62.
class PrimePool {
public:
    // Returns the first `count` primes, extending the pool if needed.
    std::vector<u64> take(std::size_t count) {
        std::lock_guard<std::mutex> lock(mu_);
        while (primes_.size() < count) {
            while (!is_prime(cursor_)) cursor_ -= 2;
            primes_.push_back(cursor_);
            cursor_ -= 2;
        }
        return std::vector<u64>(primes_.begin(), primes_.begin() + std::ptrdiff_t(count));
    }

    // Enough primes that their product exceeds `need`, plus `extra` spares.
    std::vector<u64> cover(const Integer& need, std::size_t extra) {
        std::size_t count = 1;
        while (true) {
            auto ps = take(count + extra);
            Integer prod = 1;
            for (std::size_t i = 0; i < count; ++i) prod *= ps[i];
            if (prod > need) return ps;
            ++count;
        }
    }

private:
    std::mutex mu_;
    std::vector<u64> primes_;
    u64 cursor_ = (u64(1) << 62) - 1;
};

PrimePool& prime_pool() {
    static PrimePool pool;
    return pool;
}

u64 to_residue(const Integer& v, u64 p) {
    return static_cast<u64>(mod_floor(v, Integer(p)));
}

// Determinant of a square matrix mod p by Gaussian elimination.
u64 det_mod_p(std::vector<std::vector<u64>> M, u64 p) {
    std::size_t n = M.size();
    u64 det = 1 % p;
    bool neg = false;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && M[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(M[piv], M[c]);
            neg = !neg;
        }
        det = mulmod(det, M[c][c], p);
        u64 inv = invmod(M[c][c], p);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (M[r][c] == 0) continue;
            u64 f = mulmod(M[r][c], inv, p);
            for (std::size_t k = c; k < n; ++k) {
                M[r][k] = submod(M[r][k], mulmod(f, M[c][k], p), p);
            }
        }
    }
    return neg ? negmod(det, p) : det;
}

// Symmetric-range CRT reconstruction from residues mod pairwise-distinct
// primes (incremental Garner form).
Integer crt_symmetric(const std::vector<u64>& residues, const std::vector<u64>& primes,
                      std::size_t count) {
    Integer X = residues[0];
    Integer M = primes[0];
    for (std::size_t i = 1; i < count; ++i) {
        u64 p = primes[i];
        u64 m_mod = to_residue(M, p);
        u64 x_mod = to_residue(X, p);
        u64 t = mulmod(submod(residues[i], x_mod, p), invmod(m_mod, p), p);
        X += M * t;
        M *= p;
    }
    return symmetric_mod(X, M);
}

struct EvalContext {
    // Coefficient values of f and g in v at an evaluation point, plus the
    // 1-norm bound data.
    std::vector<Integer> fvals, gvals;
};

// All coefficient-in-v values of f at the integer point, in one pass.
void eval_coeffs(const PolyZZ& f, std::size_t v, const std::vector<Integer>& pt_pows_flat,
                 const std::vector<std::size_t>& pow_offsets, std::vector<Integer>& out) {
    for (auto& x : out) x = 0;
    for (const auto& t : f.terms()) {
        Integer val = t.c;
        for (std::size_t u = 0; u < f.vars().size(); ++u) {
            if (u == v || t.m[u] == 0) continue;
            val *= pt_pows_flat[pow_offsets[u] + t.m[u]];
        }
        out[t.m[v]] += val;
    }
}

// Exact Sylvester determinant at one integer point, via per-prime dets and
// CRT under the row-norm bound.  `spare` extra primes are fetched so one can
// serve as an independent verification modulus.
Integer det_at_point(const PolyZZ& f, const PolyZZ& g, std::size_t v, unsigned dm, unsigned dn,
                     const std::vector<Integer>& point) {
    std::size_t k = f.vars().size();
    // power tables: for variable u, offsets[u] .. offsets[u]+deg   (flat)
    std::vector<std::size_t> offsets(k, 0);
    std::vector<Integer> pows;
    for (std::size_t u = 0; u < k; ++u) {
        offsets[u] = pows.size();
        if (u == v) {
            pows.push_back(1);
            continue;
        }
        unsigned d = std::max(f.degree_in(u), g.degree_in(u));
        pows.push_back(1);
        for (unsigned e = 1; e <= d; ++e) pows.push_back(pows.back() * point[u]);
    }
    std::vector<Integer> fvals(dm + 1), gvals(dn + 1);
    eval_coeffs(f, v, pows, offsets, fvals);
    eval_coeffs(g, v, pows, offsets, gvals);

    Integer fnorm = 0, gnorm = 0;
    for (const auto& x : fvals) fnorm += boost::multiprecision::abs(x);
    for (const auto& x : gvals) gnorm += boost::multiprecision::abs(x);
    if (fnorm == 0 || gnorm == 0) return 0;
    Integer bound = ipow(fnorm, dn) * ipow(gnorm, dm);

    auto primes = prime_pool().cover(2 * bound, 1);
    std::size_t nused = primes.size() - 1;
    u64 verify_p = primes.back();

    std::size_t size = std::size_t(dm) + dn;
    std::vector<u64> residues(nused);
    auto det_for = [&](u64 p) {
        std::vector<std::vector<u64>> M(size, std::vector<u64>(size, 0));
        for (unsigned r = 0; r < dn; ++r)
            for (unsigned i = 0; i <= dm; ++i) M[r][r + (dm - i)] = to_residue(fvals[i], p);
        for (unsigned r = 0; r < dm; ++r)
            for (unsigned i = 0; i <= dn; ++i) M[dn + r][r + (dn - i)] = to_residue(gvals[i], p);
        return det_mod_p(std::move(M), p);
    };
    for (std::size_t i = 0; i < nused; ++i) residues[i] = det_for(primes[i]);
    Integer det = crt_symmetric(residues, primes, nused);
    if (to_residue(det, verify_p) != det_for(verify_p))
        throw ReconstructionFailure("resultant: CRT verification prime mismatch");
    return det;
}

// In-place Newton interpolation along one line with nodes 0..d.
void interpolate_line(std::vector<Integer*>& a, std::size_t d) {
    for (std::size_t j = 1; j <= d; ++j) {
        for (std::size_t i = d; i >= j; --i) {
            Integer diff = *a[i] - *a[i - 1];
            Integer q, r;
            boost::multiprecision::divide_qr(diff, Integer(j), q, r);
            if (r != 0) throw ReconstructionFailure("resultant: non-integral divided difference");
            *a[i] = std::move(q);
            if (i == j) break;
        }
    }
    for (std::size_t i = d; i-- > 0;) {
        for (std::size_t j = i; j + 1 <= d; ++j) {
            *a[j] -= Integer(i) * *a[j + 1];
        }
    }
}

}  // namespace

PolyZZ resultant(const PolyZZ& f, const PolyZZ& g, std::size_t v) {
    if (!f.ring().same(g.ring()) || f.vars() != g.vars())
        throw DomainMismatch("resultant: operands in different domains");
    if (v >= f.vars().size()) throw Error("resultant: bad variable index");
    const auto& ring = f.ring();
    const auto& vars = f.vars();
    if (f.is_zero() || g.is_zero()) return PolyZZ(ring, vars);
    unsigned dm = f.degree_in(v), dn = g.degree_in(v);
    if (dm == 0 && dn == 0) return PolyZZ::constant(ring, vars, 1);

    std::size_t k = vars.size();
    // Per-variable degree bounds of the resultant.
    std::vector<unsigned> D(k, 0);
    std::vector<std::size_t> rem;  // variables other than v that can appear
    for (std::size_t u = 0; u < k; ++u) {
        if (u == v) continue;
        D[u] = f.degree_in(u) * dn + g.degree_in(u) * dm;
        if (D[u] > 0) rem.push_back(u);
    }

    // Tensor grid over the active variables, row-major with the last active
    // variable contiguous.
    std::vector<std::size_t> sizes(rem.size());
    std::size_t total = 1;
    for (std::size_t d = 0; d < rem.size(); ++d) {
        sizes[d] = D[rem[d]] + 1;
        total *= sizes[d];
    }

    std::vector<Integer> values(total);
    parallel_for(total, [&](std::size_t idx) {
        std::vector<Integer> point(k, 0);
        std::size_t rest = idx;
        for (std::size_t d = rem.size(); d-- > 0;) {
            point[rem[d]] = Integer(rest % sizes[d]);
            rest /= sizes[d];
        }
        values[idx] = det_at_point(f, g, v, dm, dn, point);
    });

    // Interpolate dimension by dimension.
    std::size_t stride = 1;
    for (std::size_t d = rem.size(); d-- > 0;) {
        std::size_t len = sizes[d];
        std::size_t block = stride * len;
        std::vector<std::size_t> bases;
        for (std::size_t base = 0; base < total; base += block)
            for (std::size_t off = 0; off < stride; ++off) bases.push_back(base + off);
        parallel_for(bases.size(), [&](std::size_t bi) {
            std::vector<Integer*> line(len);
            for (std::size_t i = 0; i < len; ++i) line[i] = &values[bases[bi] + i * stride];
            interpolate_line(line, len - 1);
        });
        stride = block;
    }

    std::vector<PolyZZ::Term> terms;
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (values[idx] == 0) continue;
        Mono m = mono_zero();
        std::size_t rest = idx;
        for (std::size_t d = rem.size(); d-- > 0;) {
            m[rem[d]] = std::uint16_t(rest % sizes[d]);
            rest /= sizes[d];
        }
        terms.push_back({m, values[idx]});
    }
    PolyZZ result = PolyZZ::from_terms(ring, vars, std::move(terms));

    // Off-grid spot checks: the interpolated polynomial must agree with the
    // directly computed determinant.  Deterministic probe points.
    std::mt19937_64 rng(0x5eedbeefULL ^ (u64(dm) << 32) ^ dn);
    for (int probe = 0; probe < 3; ++probe) {
        std::vector<Integer> point(k, 0);
        for (std::size_t d = 0; d < rem.size(); ++d) {
            u64 x = D[rem[d]] + 1 + rng() % 64;
            point[rem[d]] = Integer(x);
        }
        Integer direct = det_at_point(f, g, v, dm, dn, point);
        // Evaluate the result at the probe point.
        Integer acc = 0;
        for (const auto& t : result.terms()) {
            Integer val = t.c;
            for (std::size_t u = 0; u < k; ++u)
                if (t.m[u]) val *= ipow(point[u], t.m[u]);
            acc += val;
        }
        if (acc != direct)
            throw ReconstructionFailure("resultant: interpolation failed an off-grid spot check");
    }
    return result;
}

PolyZZ discriminant(const PolyZZ& f, std::size_t v) {
    unsigned d = f.degree_in(v);
    if (d < 1) throw Error("discriminant: polynomial constant in the chosen variable");
    auto res = resultant(f, f.derivative(v), v);
    auto q = res.exact_div(coeff_in_var(f, v, d));
    return (std::uint64_t(d) * (d - 1) / 2) % 2 ? q.neg() : q;
}

}  // namespace permrat
