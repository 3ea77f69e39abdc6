#include "permrat/field.h"

#include <algorithm>
#include <sstream>

#include "permrat/errors.h"
#include "permrat/primes.h"

namespace permrat {

namespace {

// Dense F_p[x] helpers on coefficient vectors (lowest degree first, no
// trailing-zero guarantee; deg() trims).
int pdeg(const std::vector<u64>& a) {
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; i--)
        if (a[i]) return i;
    return -1;
}

std::vector<u64> pmul(const std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    std::vector<u64> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); i++) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); j++) {
            if (b[j]) r[i + j] = addmod(r[i + j], mulmod(a[i], b[j], p), p);
        }
    }
    return r;
}

// a mod m, m monic given as c_0..c_{n-1} for x^n + sum c_i x^i.
std::vector<u64> pmod_monic(std::vector<u64> a, const std::vector<u64>& m, u64 p) {
    const size_t n = m.size();
    for (int k = static_cast<int>(a.size()) - 1; k >= static_cast<int>(n); k--) {
        u64 c = a[k];
        if (!c) continue;
        a[k] = 0;
        for (size_t i = 0; i < n; i++) {
            if (m[i]) a[k - n + i] = submod(a[k - n + i], mulmod(c, m[i], p), p);
        }
    }
    a.resize(n, 0);
    return a;
}

// General division with remainder by a monic divisor; returns remainder.
std::vector<u64> prem(std::vector<u64> a, const std::vector<u64>& b, u64 p) {
    int db = pdeg(b);
    u64 lcinv = invmod(b[db], p);
    for (int k = pdeg(a); k >= db; k = pdeg(a)) {
        u64 c = mulmod(a[k], lcinv, p);
        for (int i = 0; i <= db; i++) {
            a[k - db + i] = submod(a[k - db + i], mulmod(c, b[i], p), p);
        }
        if (pdeg(a) == k) a[k] = 0;  // numerical safety; c*lc cancels exactly
    }
    return a;
}

std::vector<u64> pgcd(std::vector<u64> a, std::vector<u64> b, u64 p) {
    while (pdeg(b) >= 0) {
        auto r = prem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

bool is_irreducible(const std::vector<u64>& mod_tail, u64 p) {
    // mod_tail = c_0..c_{n-1} of f = x^n + ...; f irreducible over F_p iff
    //   x^{p^n} == x (mod f), and
    //   gcd(x^{p^{n/r}} - x, f) == 1 for every prime r | n.
    const int n = static_cast<int>(mod_tail.size());
    auto xpow = [&](u64 iters) {
        // x^(p^iters) mod f by repeated Frobenius powering
        std::vector<u64> cur(n, 0);
        if (n == 1) {
            // field is F_p; x = -c0
            cur[0] = negmod(mod_tail[0], p);
        } else {
            cur[1] = 1;
        }
        for (u64 t = 0; t < iters; t++) {
            // cur <- cur^p via square-and-multiply on exponent p
            std::vector<u64> acc(1, 1);
            std::vector<u64> base = cur;
            u64 e = p;
            while (e) {
                if (e & 1) acc = pmod_monic(pmul(acc, base, p), mod_tail, p);
                base = pmod_monic(pmul(base, base, p), mod_tail, p);
                e >>= 1;
            }
            cur = acc;
        }
        return cur;
    };

    // x^{p^n} == x
    auto xn = xpow(n);
    std::vector<u64> x(n, 0);
    if (n == 1) {
        x[0] = negmod(mod_tail[0], p);
    } else {
        x[1] = 1;
    }
    if (xn != x) return false;

    std::vector<int> prime_divs;
    int m = n;
    for (int r = 2; r * r <= m; r++) {
        if (m % r == 0) {
            prime_divs.push_back(r);
            while (m % r == 0) m /= r;
        }
    }
    if (m > 1) prime_divs.push_back(m);

    std::vector<u64> f = mod_tail;
    f.push_back(1);
    for (int r : prime_divs) {
        auto xr = xpow(static_cast<u64>(n / r));
        // g = xr - x
        std::vector<u64> g = xr;
        if (n == 1) {
            g[0] = submod(g[0], negmod(mod_tail[0], p), p);
        } else {
            g.resize(std::max<size_t>(g.size(), 2), 0);
            g[1] = submod(g[1], 1, p);
        }
        auto d = pgcd(f, g, p);
        if (pdeg(d) != 0) return false;
    }
    return true;
}

}  // namespace

FieldConfig make_field(u64 p, int n) {
    if (!is_prime(p)) throw NotPrime("make_field: p is not prime");
    if (n < 1) throw DegreeOutOfRange("make_field: n must be >= 1");
    if (p >= (1ull << 63)) throw DegreeOutOfRange("make_field: p must be < 2^63");

    FieldConfig cfg;
    cfg.p = p;
    cfg.n = n;

    // Smallest monic irreducible by base-p value of (c_0..c_{n-1}),
    // c_{n-1} most significant.
    std::vector<u64> tail(n, 0);
    auto bump = [&]() {
        for (int i = 0; i < n; i++) {
            if (++tail[i] < p) return true;
            tail[i] = 0;
        }
        return false;
    };
    for (;;) {
        if (is_irreducible(tail, p)) break;
        if (!bump()) throw Error("make_field: no irreducible modulus found");
    }
    cfg.modulus = tail;

    // Frobenius matrix: (x^i)^p = (x^p)^i mod f.
    std::vector<u64> xp;
    {
        std::vector<u64> acc(1, 1), base(2, 0);
        if (n == 1) {
            base = {negmod(tail[0], p)};
        } else {
            base[1] = 1;
        }
        u64 e = p;
        while (e) {
            if (e & 1) acc = pmod_monic(pmul(acc, base, p), tail, p);
            base = pmod_monic(pmul(base, base, p), tail, p);
            e >>= 1;
        }
        xp = acc;
    }
    cfg.frob.assign(n, std::vector<u64>(n, 0));
    std::vector<u64> pw(n, 0);
    pw[0] = 1;
    for (int i = 0; i < n; i++) {
        cfg.frob[i] = pw;
        if (i + 1 < n) pw = pmod_monic(pmul(pw, xp, p), tail, p);
    }

    // p^n if it fits
    u128 q = 1;
    bool fits = true;
    for (int i = 0; i < n; i++) {
        q *= p;
        if (q > ~0ull) {
            fits = false;
            break;
        }
    }
    cfg.q_fits_u64 = fits;
    cfg.q = fits ? static_cast<u64>(q) : 0;
    return cfg;
}

ExtElement ext_zero(const FieldConfig& cfg) { return ExtElement(cfg.n, 0); }

ExtElement ext_one(const FieldConfig& cfg) {
    ExtElement e(cfg.n, 0);
    e[0] = 1 % cfg.p;
    return e;
}

ExtElement ext_from_u64(const FieldConfig& cfg, u64 v) {
    ExtElement e(cfg.n, 0);
    e[0] = v % cfg.p;
    return e;
}

bool ext_is_zero(const ExtElement& a) {
    return std::all_of(a.begin(), a.end(), [](u64 c) { return c == 0; });
}

ExtElement ext_add(const FieldConfig& cfg, const ExtElement& a, const ExtElement& b) {
    ExtElement r(cfg.n);
    for (int i = 0; i < cfg.n; i++) r[i] = addmod(a[i], b[i], cfg.p);
    return r;
}

ExtElement ext_sub(const FieldConfig& cfg, const ExtElement& a, const ExtElement& b) {
    ExtElement r(cfg.n);
    for (int i = 0; i < cfg.n; i++) r[i] = submod(a[i], b[i], cfg.p);
    return r;
}

ExtElement ext_neg(const FieldConfig& cfg, const ExtElement& a) {
    ExtElement r(cfg.n);
    for (int i = 0; i < cfg.n; i++) r[i] = negmod(a[i], cfg.p);
    return r;
}

ExtElement ext_scal(const FieldConfig& cfg, u64 k, const ExtElement& a) {
    ExtElement r(cfg.n);
    k %= cfg.p;
    for (int i = 0; i < cfg.n; i++) r[i] = mulmod(k, a[i], cfg.p);
    return r;
}

ExtElement ext_mul(const FieldConfig& cfg, const ExtElement& a, const ExtElement& b) {
    return pmod_monic(pmul(a, b, cfg.p), cfg.modulus, cfg.p);
}

ExtElement ext_pow(const FieldConfig& cfg, ExtElement a, u64 e) {
    ExtElement r = ext_one(cfg);
    while (e) {
        if (e & 1) r = ext_mul(cfg, r, a);
        a = ext_mul(cfg, a, a);
        e >>= 1;
    }
    return r;
}

ExtElement ext_inv(const FieldConfig& cfg, const ExtElement& a) {
    if (ext_is_zero(a)) throw NotInvertible("ext_inv: zero element");
    // Extended Euclid in F_p[x] against the modulus.
    const u64 p = cfg.p;
    std::vector<u64> f = cfg.modulus;
    f.push_back(1);
    std::vector<u64> r0 = f, r1 = a;
    std::vector<u64> s0 = {0}, s1 = {1};  // coefficients on `a`
    while (pdeg(r1) > 0) {
        int d0 = pdeg(r0), d1 = pdeg(r1);
        if (d0 < d1) {
            std::swap(r0, r1);
            std::swap(s0, s1);
            continue;
        }
        // r0 -= (lc0/lc1) x^{d0-d1} r1, same on s
        u64 c = mulmod(r0[d0], invmod(r1[d1], p), p);
        int sh = d0 - d1;
        auto axpy = [&](std::vector<u64>& dst, const std::vector<u64>& src) {
            if (dst.size() < src.size() + sh) dst.resize(src.size() + sh, 0);
            for (int i = 0; i <= pdeg(src); i++) {
                dst[i + sh] = submod(dst[i + sh], mulmod(c, src[i], p), p);
            }
        };
        axpy(r0, r1);
        axpy(s0, s1);
        if (pdeg(r0) < pdeg(r1)) {
            std::swap(r0, r1);
            std::swap(s0, s1);
        }
    }
    if (pdeg(r1) != 0) throw NotInvertible("ext_inv: gcd with modulus is nonconstant");
    u64 lcinv = invmod(r1[0], p);
    std::vector<u64> inv(cfg.n, 0);
    for (int i = 0; i <= pdeg(s1) && i < cfg.n; i++) inv[i] = mulmod(s1[i], lcinv, p);
    return inv;
}

ExtElement frobenius(const FieldConfig& cfg, const ExtElement& a) {
    ExtElement r(cfg.n, 0);
    for (int i = 0; i < cfg.n; i++) {
        if (!a[i]) continue;
        for (int j = 0; j < cfg.n; j++) {
            r[j] = addmod(r[j], mulmod(a[i], cfg.frob[i][j], cfg.p), cfg.p);
        }
    }
    return r;
}

u64 trace(const FieldConfig& cfg, const ExtElement& a) {
    ExtElement s = a, x = a;
    for (int i = 1; i < cfg.n; i++) {
        x = frobenius(cfg, x);
        s = ext_add(cfg, s, x);
    }
    return s[0];  // higher coordinates vanish for a Galois-invariant element
}

ExtElement element_at(const FieldConfig& cfg, u64 k) {
    ExtElement e(cfg.n);
    for (int i = cfg.n - 1; i >= 0; i--) {
        e[i] = k % cfg.p;
        k /= cfg.p;
    }
    return e;
}

u64 index_of(const FieldConfig& cfg, const ExtElement& a) {
    u64 k = 0;
    for (int i = 0; i < cfg.n; i++) k = k * cfg.p + a[i];
    return k;
}

std::string ext_to_string(const ExtElement& a) {
    std::ostringstream os;
    for (size_t i = 0; i < a.size(); i++) {
        if (i) os << ',';
        os << a[i];
    }
    return os.str();
}

ExtElement ext_parse(const FieldConfig& cfg, const std::string& s) {
    ExtElement e;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            size_t pos = 0;
            unsigned long long v = std::stoull(tok, &pos);
            if (pos != tok.size()) throw ParseError("ext_parse: trailing junk in coordinate");
            e.push_back(v % cfg.p);
        } catch (const std::invalid_argument&) {
            throw ParseError("ext_parse: bad coordinate '" + tok + "'");
        } catch (const std::out_of_range&) {
            throw ParseError("ext_parse: coordinate out of range '" + tok + "'");
        }
    }
    if (static_cast<int>(e.size()) != cfg.n) {
        throw ParseError("ext_parse: expected " + std::to_string(cfg.n) + " coordinates");
    }
    return e;
}

ExtElement ext_matrix_det(const FieldConfig& cfg, std::vector<std::vector<ExtElement>> m) {
    const int n = static_cast<int>(m.size());
    ExtElement det = ext_one(cfg);
    for (int col = 0; col < n; col++) {
        int piv = -1;
        for (int r = col; r < n; r++) {
            if (!ext_is_zero(m[r][col])) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return ext_zero(cfg);
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = ext_neg(cfg, det);
        }
        det = ext_mul(cfg, det, m[col][col]);
        ExtElement inv = ext_inv(cfg, m[col][col]);
        for (int r = col + 1; r < n; r++) {
            if (ext_is_zero(m[r][col])) continue;
            ExtElement f = ext_mul(cfg, m[r][col], inv);
            for (int c = col; c < n; c++) {
                m[r][c] = ext_sub(cfg, m[r][c], ext_mul(cfg, f, m[col][c]));
            }
        }
    }
    return det;
}

std::optional<std::vector<std::vector<ExtElement>>> ext_matrix_inverse(
    const FieldConfig& cfg, std::vector<std::vector<ExtElement>> m) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<ExtElement>> inv(n, std::vector<ExtElement>(n, ext_zero(cfg)));
    for (int i = 0; i < n; i++) inv[i][i] = ext_one(cfg);
    for (int col = 0; col < n; col++) {
        int piv = -1;
        for (int r = col; r < n; r++) {
            if (!ext_is_zero(m[r][col])) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return std::nullopt;
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        ExtElement d = ext_inv(cfg, m[col][col]);
        for (int c = 0; c < n; c++) {
            m[col][c] = ext_mul(cfg, m[col][c], d);
            inv[col][c] = ext_mul(cfg, inv[col][c], d);
        }
        for (int r = 0; r < n; r++) {
            if (r == col || ext_is_zero(m[r][col])) continue;
            ExtElement f = m[r][col];
            for (int c = 0; c < n; c++) {
                m[r][c] = ext_sub(cfg, m[r][c], ext_mul(cfg, f, m[col][c]));
                inv[r][c] = ext_sub(cfg, inv[r][c], ext_mul(cfg, f, inv[col][c]));
            }
        }
    }
    return inv;
}

MooreMatrix moore_matrix(const FieldConfig& cfg, const ExtElement& z) {
    const int n = cfg.n;
    MooreMatrix M;
    M.generator = z;

    // Frobenius orbit z^{p^k}, k = 0..n-1.
    std::vector<ExtElement> orbit(n);
    orbit[0] = z;
    for (int k = 1; k < n; k++) orbit[k] = frobenius(cfg, orbit[k - 1]);

    M.entries.assign(n, std::vector<ExtElement>(n));
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) M.entries[i][j] = orbit[(i + j) % n];
    }

    M.det = ext_matrix_det(cfg, M.entries);
    M.invertible = !ext_is_zero(M.det);
    if (M.invertible) {
        auto inv = ext_matrix_inverse(cfg, M.entries);
        M.inverse = std::move(*inv);
        // The inverse of a Moore matrix is again a Moore matrix; read w off
        // the (0,0) entry and verify the shape.
        ExtElement w = M.inverse[0][0];
        std::vector<ExtElement> worbit(n);
        worbit[0] = w;
        for (int k = 1; k < n; k++) worbit[k] = frobenius(cfg, worbit[k - 1]);
        bool shape = true;
        for (int i = 0; i < n && shape; i++) {
            for (int j = 0; j < n && shape; j++) {
                if (M.inverse[i][j] != worbit[(i + j) % n]) shape = false;
            }
        }
        if (!shape) throw Error("moore_matrix: inverse lost the Moore shape");
        M.w = w;
    }
    return M;
}

ExtElement find_normal_element(const FieldConfig& cfg) {
    u64 count = cfg.q_fits_u64 ? cfg.q : ~0ull;
    for (u64 k = 0; k < count; k++) {
        ExtElement z = element_at(cfg, k);
        MooreMatrix M = moore_matrix(cfg, z);
        if (M.invertible) return z;
    }
    throw Error("find_normal_element: exhausted field without finding one");
}

ExtElement artin_schreier_solve(const FieldConfig& cfg, const ExtElement& c) {
    if (trace(cfg, c) != 0) throw NoSolution("artin_schreier_solve: trace(c) != 0");
    const int n = cfg.n;
    const u64 p = cfg.p;

    // Coordinates of the F_p-linear map x -> x^p - x; column i is the image
    // of the basis vector x^i.
    std::vector<std::vector<u64>> A(n, std::vector<u64>(n + 1, 0));
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            u64 v = cfg.frob[i][j];
            if (i == j) v = submod(v, 1, p);
            A[j][i] = v;  // row j: coordinate j of the image
        }
    }
    for (int j = 0; j < n; j++) A[j][n] = c[j];

    // Gaussian elimination; the kernel is F_p (dimension 1), so rank is n-1
    // and consistency is guaranteed by the trace condition.
    std::vector<int> pivot_col(n, -1);
    int row = 0;
    for (int col = 0; col < n && row < n; col++) {
        int piv = -1;
        for (int r = row; r < n; r++) {
            if (A[r][col]) {
                piv = r;
                break;
            }
        }
        if (piv < 0) continue;
        std::swap(A[piv], A[row]);
        u64 inv = invmod(A[row][col], p);
        for (int cc = col; cc <= n; cc++) A[row][cc] = mulmod(A[row][cc], inv, p);
        for (int r = 0; r < n; r++) {
            if (r == row || !A[r][col]) continue;
            u64 f = A[r][col];
            for (int cc = col; cc <= n; cc++) {
                A[r][cc] = submod(A[r][cc], mulmod(f, A[row][cc], p), p);
            }
        }
        pivot_col[row] = col;
        row++;
    }
    for (int r = row; r < n; r++) {
        if (A[r][n]) throw NoSolution("artin_schreier_solve: inconsistent system");
    }

    ExtElement x(n, 0);
    for (int r = 0; r < row; r++) x[pivot_col[r]] = A[r][n];

    // Canonicalize: kernel is spanned by 1 = (1,0,...,0); choose the solution
    // with first coordinate 0.
    u64 k = x[0];
    if (k) {
        ExtElement shift = ext_from_u64(cfg, k);
        x = ext_sub(cfg, x, shift);
    }
    return x;
}

}  // namespace permrat
