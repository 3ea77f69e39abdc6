#pragma once

#include "permrat/errors.h"
#include "permrat/field.h"
#include "permrat/fp64.h"
#include "permrat/integer.h"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace permrat {

// ---------------------------------------------------------------------------
// Variables and monomials
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxVars = 8;

// Exponent vector.  Entries beyond the active VarSet size stay zero.
using Mono = std::array<std::uint16_t, kMaxVars>;

inline Mono mono_zero() { return Mono{}; }

inline unsigned mono_total(const Mono& m, std::size_t k) {
    unsigned s = 0;
    for (std::size_t i = 0; i < k; ++i) s += m[i];
    return s;
}

// Graded lexicographic comparison.  Grading counts every variable.  Ties
// break at the last-listed variable first: the variable order is ascending
// in list position, so the final name is the largest.
inline int mono_cmp(const Mono& a, const Mono& b, std::size_t k) {
    unsigned da = mono_total(a, k), db = mono_total(b, k);
    if (da != db) return da < db ? -1 : 1;
    for (std::size_t i = k; i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

inline bool mono_divides(const Mono& a, const Mono& b) {
    for (std::size_t i = 0; i < kMaxVars; ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Mono mono_add(const Mono& a, const Mono& b) {
    Mono r;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
        unsigned s = unsigned(a[i]) + unsigned(b[i]);
        if (s > 0xffffu) throw Error("monomial exponent overflow");
        r[i] = std::uint16_t(s);
    }
    return r;
}

// b - a; requires a | b.
inline Mono mono_sub(const Mono& b, const Mono& a) {
    Mono r;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
        if (a[i] > b[i]) throw Error("monomial subtraction underflow");
        r[i] = std::uint16_t(b[i] - a[i]);
    }
    return r;
}

struct MonoHash {
    std::size_t operator()(const Mono& m) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::size_t i = 0; i < kMaxVars; ++i) {
            h ^= m[i];
            h *= 1099511628211ull;
        }
        return std::size_t(h);
    }
};

// Ordered list of variable names.  A variable may be flagged as a parameter:
// parameters take part in the monomial order but are excluded from the
// Y-degree used by homogeneous decomposition, the tilde transform and the
// cyclicity test.
struct VarSet {
    std::vector<std::string> names;
    std::uint8_t param_mask = 0;

    std::size_t size() const { return names.size(); }
    bool is_param(std::size_t i) const { return (param_mask >> i) & 1u; }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return int(i);
        return -1;
    }

    // Indices of non-parameter variables, in listed order.
    std::vector<std::size_t> main_block() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (!is_param(i)) idx.push_back(i);
        return idx;
    }

    bool operator==(const VarSet& o) const {
        return names == o.names && param_mask == o.param_mask;
    }
    bool operator!=(const VarSet& o) const { return !(*this == o); }
};

inline VarSet make_varset(std::vector<std::string> names,
                          const std::vector<std::string>& params = {}) {
    if (names.size() > kMaxVars) throw Error("too many variables");
    VarSet vs;
    vs.names = std::move(names);
    for (std::size_t i = 0; i < vs.names.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.names.size(); ++j)
            if (vs.names[i] == vs.names[j]) throw Error("duplicate variable name: " + vs.names[i]);
    }
    for (const auto& p : params) {
        int i = vs.index_of(p);
        if (i < 0) throw Error("parameter not in variable list: " + p);
        vs.param_mask |= std::uint8_t(1u << i);
    }
    return vs;
}

// ---------------------------------------------------------------------------
// Coefficient rings
// ---------------------------------------------------------------------------

// Arbitrary-precision integers.
struct ZZRing {
    using Elem = Integer;
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem from_unsigned(unsigned v) const { return Integer(v); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool equal(const Elem& a, const Elem& b) const { return a == b; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    bool try_div(const Elem& a, const Elem& b, Elem& q) const {
        if (b == 0) return false;
        Integer r;
        boost::multiprecision::divide_qr(a, b, q, r);
        return r == 0;
    }
    std::string to_string(const Elem& a) const { return a.str(); }
    bool parse_elem(const std::string& s, Elem& out) const {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        out = Integer(s);
        return true;
    }
    bool same(const ZZRing&) const { return true; }
    std::string describe() const { return "ZZ"; }
};

// Integers modulo a word-sized prime.
struct FpRing {
    u64 p = 0;
    using Elem = u64;
    Elem zero() const { return 0; }
    Elem one() const { return p == 1 ? 0 : 1; }
    Elem from_unsigned(unsigned v) const { return u64(v) % p; }
    bool is_zero(const Elem& a) const { return a == 0; }
    bool equal(const Elem& a, const Elem& b) const { return a == b; }
    Elem add(const Elem& a, const Elem& b) const { return addmod(a, b, p); }
    Elem sub(const Elem& a, const Elem& b) const { return submod(a, b, p); }
    Elem mul(const Elem& a, const Elem& b) const { return mulmod(a, b, p); }
    Elem neg(const Elem& a) const { return negmod(a, p); }
    bool try_div(const Elem& a, const Elem& b, Elem& q) const {
        if (b == 0) return false;
        q = mulmod(a, invmod(b, p), p);
        return true;
    }
    std::string to_string(const Elem& a) const { return std::to_string(a); }
    bool parse_elem(const std::string& s, Elem& out) const {
        if (s.empty()) return false;
        bool neg_sign = s[0] == '-';
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        u64 acc = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
            acc = addmod(mulmod(acc, 10 % p, p), u64(s[i] - '0') % p, p);
        }
        out = neg_sign ? negmod(acc, p) : acc;
        return true;
    }
    bool same(const FpRing& o) const { return p == o.p; }
    std::string describe() const { return "Fp(" + std::to_string(p) + ")"; }
};

// Extension field F_{p^n} via a borrowed FieldConfig.
struct ExtRing {
    const FieldConfig* F = nullptr;
    using Elem = ExtElement;
    Elem zero() const { return ext_zero(*F); }
    Elem one() const { return ext_one(*F); }
    Elem from_unsigned(unsigned v) const { return ext_from_u64(*F, u64(v) % F->p); }
    bool is_zero(const Elem& a) const { return ext_is_zero(a); }
    bool equal(const Elem& a, const Elem& b) const { return a == b; }
    Elem add(const Elem& a, const Elem& b) const { return ext_add(*F, a, b); }
    Elem sub(const Elem& a, const Elem& b) const { return ext_sub(*F, a, b); }
    Elem mul(const Elem& a, const Elem& b) const { return ext_mul(*F, a, b); }
    Elem neg(const Elem& a) const { return ext_neg(*F, a); }
    bool try_div(const Elem& a, const Elem& b, Elem& q) const {
        if (ext_is_zero(b)) return false;
        q = ext_mul(*F, a, ext_inv(*F, b));
        return true;
    }
    std::string to_string(const Elem& a) const { return ext_to_string(a); }
    bool parse_elem(const std::string& s, Elem& out) const {
        try {
            out = ext_parse(*F, s);
        } catch (const Error&) {
            return false;
        }
        return true;
    }
    bool same(const ExtRing& o) const {
        return F->p == o.F->p && F->n == o.F->n && F->modulus == o.F->modulus;
    }
    std::string describe() const {
        return "F(" + std::to_string(F->p) + "^" + std::to_string(F->n) + ")";
    }
};

// ---------------------------------------------------------------------------
// Sparse polynomials
// ---------------------------------------------------------------------------

template <class R>
class SparsePoly {
public:
    using Ring = R;
    using Elem = typename R::Elem;

    struct Term {
        Mono m;
        Elem c;
    };

    SparsePoly() = default;
    SparsePoly(R ring, VarSet vars) : ring_(std::move(ring)), vars_(std::move(vars)) {}

    static SparsePoly constant(R ring, VarSet vars, Elem c) {
        SparsePoly f(std::move(ring), std::move(vars));
        if (!f.ring_.is_zero(c)) f.terms_.push_back(Term{mono_zero(), std::move(c)});
        return f;
    }

    static SparsePoly variable(R ring, VarSet vars, const std::string& name, unsigned e = 1) {
        int i = vars.index_of(name);
        if (i < 0) throw Error("unknown variable: " + name);
        SparsePoly f(std::move(ring), std::move(vars));
        if (e > 0xffffu) throw Error("monomial exponent overflow");
        Mono m = mono_zero();
        m[std::size_t(i)] = std::uint16_t(e);
        f.terms_.push_back(Term{m, f.ring_.one()});
        return f;
    }

    // Builds from arbitrary terms: sorts, merges duplicates, drops zeros.
    static SparsePoly from_terms(R ring, VarSet vars, std::vector<Term> terms) {
        SparsePoly f(std::move(ring), std::move(vars));
        f.terms_ = std::move(terms);
        f.normalize();
        return f;
    }

    const R& ring() const { return ring_; }
    const VarSet& vars() const { return vars_; }
    std::size_t nterms() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    // Leading term under the graded-lex order (terms_ is descending).
    const Term& leading() const {
        if (terms_.empty()) throw Error("leading term of zero polynomial");
        return terms_.front();
    }

    Elem coeff(const Mono& m) const {
        std::size_t k = vars_.size();
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [k](const Term& t, const Mono& key) {
                                       return mono_cmp(t.m, key, k) > 0;
                                   });
        if (it != terms_.end() && mono_cmp(it->m, m, k) == 0) return it->c;
        return ring_.zero();
    }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max(d, mono_total(t.m, vars_.size()));
        return d;
    }

    // Total degree over the non-parameter block.
    unsigned degree_main() const {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max(d, main_degree_of(t.m));
        return d;
    }

    unsigned degree_in(std::size_t var) const {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max(d, unsigned(t.m[var]));
        return d;
    }

    unsigned min_exponent(std::size_t var) const {
        if (terms_.empty()) return 0;
        unsigned d = 0xffffffffu;
        for (const auto& t : terms_) d = std::min(d, unsigned(t.m[var]));
        return d;
    }

    SparsePoly neg() const {
        SparsePoly r(ring_, vars_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back(Term{t.m, ring_.neg(t.c)});
        return r;
    }

    SparsePoly add(const SparsePoly& g) const {
        require_same_domain(g);
        SparsePoly r(ring_, vars_);
        r.terms_.reserve(terms_.size() + g.terms_.size());
        std::size_t k = vars_.size();
        std::size_t i = 0, j = 0;
        while (i < terms_.size() && j < g.terms_.size()) {
            int c = mono_cmp(terms_[i].m, g.terms_[j].m, k);
            if (c > 0) {
                r.terms_.push_back(terms_[i++]);
            } else if (c < 0) {
                r.terms_.push_back(g.terms_[j++]);
            } else {
                Elem s = ring_.add(terms_[i].c, g.terms_[j].c);
                if (!ring_.is_zero(s)) r.terms_.push_back(Term{terms_[i].m, std::move(s)});
                ++i;
                ++j;
            }
        }
        for (; i < terms_.size(); ++i) r.terms_.push_back(terms_[i]);
        for (; j < g.terms_.size(); ++j) r.terms_.push_back(g.terms_[j]);
        return r;
    }

    SparsePoly sub(const SparsePoly& g) const { return add(g.neg()); }

    SparsePoly scal(const Elem& c) const {
        SparsePoly r(ring_, vars_);
        if (ring_.is_zero(c)) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            Elem v = ring_.mul(t.c, c);
            if (!ring_.is_zero(v)) r.terms_.push_back(Term{t.m, std::move(v)});
        }
        return r;
    }

    // f * c*X^m for a single term.
    SparsePoly mul_term(const Mono& m, const Elem& c) const {
        SparsePoly r(ring_, vars_);
        if (ring_.is_zero(c)) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            Elem v = ring_.mul(t.c, c);
            if (!ring_.is_zero(v)) r.terms_.push_back(Term{mono_add(t.m, m), std::move(v)});
        }
        return r;
    }

    SparsePoly mul(const SparsePoly& g) const {
        require_same_domain(g);
        SparsePoly r(ring_, vars_);
        if (terms_.empty() || g.terms_.empty()) return r;
        std::size_t prods = terms_.size() * g.terms_.size();
        if (prods <= (std::size_t(1) << 22)) {
            std::vector<Term> acc;
            acc.reserve(prods);
            for (const auto& a : terms_)
                for (const auto& b : g.terms_)
                    acc.push_back(Term{mono_add(a.m, b.m), ring_.mul(a.c, b.c)});
            r.terms_ = std::move(acc);
            r.normalize();
        } else {
            // Hash accumulation avoids materializing every cross product.
            std::unordered_map<Mono, Elem, MonoHash> acc;
            acc.reserve(terms_.size() + g.terms_.size());
            for (const auto& a : terms_) {
                for (const auto& b : g.terms_) {
                    Mono m = mono_add(a.m, b.m);
                    auto [it, fresh] = acc.try_emplace(m, ring_.zero());
                    it->second = ring_.add(it->second, ring_.mul(a.c, b.c));
                    if (!fresh && ring_.is_zero(it->second)) acc.erase(it);
                }
            }
            r.terms_.reserve(acc.size());
            for (auto& [m, c] : acc) {
                if (!ring_.is_zero(c)) r.terms_.push_back(Term{m, std::move(c)});
            }
            r.sort_terms();
        }
        return r;
    }

    SparsePoly pow(unsigned e) const {
        SparsePoly acc = constant(ring_, vars_, ring_.one());
        SparsePoly base = *this;
        while (e) {
            if (e & 1u) acc = acc.mul(base);
            e >>= 1u;
            if (e) base = base.mul(base);
        }
        return acc;
    }

    // Exact quotient f/g; throws NotDivisible (with the first obstructing
    // term) when no quotient exists over this coefficient ring.
    SparsePoly exact_div(const SparsePoly& g) const {
        require_same_domain(g);
        if (g.is_zero()) throw NotDivisible("division by zero polynomial");
        std::size_t k = vars_.size();
        auto greater = [k](const Mono& a, const Mono& b) { return mono_cmp(a, b, k) > 0; };
        std::map<Mono, Elem, decltype(greater)> rem(greater);
        for (const auto& t : terms_) rem.emplace(t.m, t.c);
        const Term& gl = g.leading();
        std::vector<Term> q;
        while (!rem.empty()) {
            auto lead = rem.begin();
            if (!mono_divides(gl.m, lead->first)) {
                throw NotDivisible("obstructing term " + mono_debug(lead->first));
            }
            Elem qc;
            if (!ring_.try_div(lead->second, gl.c, qc)) {
                throw NotDivisible("coefficient not divisible at " + mono_debug(lead->first));
            }
            Mono qm = mono_sub(lead->first, gl.m);
            q.push_back(Term{qm, qc});
            for (const auto& t : g.terms_) {
                Mono m = mono_add(qm, t.m);
                Elem delta = ring_.mul(qc, t.c);
                auto it = rem.find(m);
                if (it == rem.end()) {
                    rem.emplace(m, ring_.neg(delta));
                } else {
                    it->second = ring_.sub(it->second, delta);
                    if (ring_.is_zero(it->second)) rem.erase(it);
                }
            }
        }
        SparsePoly out(ring_, vars_);
        out.terms_ = std::move(q);  // generated in strictly descending order
        return out;
    }

    bool divides(const SparsePoly& f) const {
        try {
            (void)f.exact_div(*this);
            return true;
        } catch (const NotDivisible&) {
            return false;
        }
    }

    SparsePoly derivative(std::size_t var) const {
        SparsePoly r(ring_, vars_);
        for (const auto& t : terms_) {
            if (t.m[var] == 0) continue;
            Elem c = ring_.mul(t.c, ring_.from_unsigned(t.m[var]));
            if (ring_.is_zero(c)) continue;
            Mono m = t.m;
            m[var] = std::uint16_t(m[var] - 1);
            r.terms_.push_back(Term{m, std::move(c)});
        }
        // descending order is preserved only per-exponent class; re-sort
        r.sort_terms();
        return r;
    }

    // Integer content: positive gcd of all coefficients (ZZRing only).
    Integer content() const {
        static_assert(std::is_same_v<R, ZZRing>, "content is defined for integer polynomials");
        Integer g = 0;
        for (const auto& t : terms_) {
            g = boost::multiprecision::gcd(g, t.c);
            if (g == 1) break;
        }
        return g < 0 ? Integer(-g) : g;
    }

    SparsePoly divexact_scalar(const Elem& c) const {
        SparsePoly r(ring_, vars_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            Elem q;
            if (!ring_.try_div(t.c, c, q))
                throw NotDivisible("scalar does not divide coefficient " + ring_.to_string(t.c));
            r.terms_.push_back(Term{t.m, std::move(q)});
        }
        return r;
    }

    SparsePoly primitive_part() const {
        static_assert(std::is_same_v<R, ZZRing>, "primitive_part is defined for integer polynomials");
        Integer c = content();
        if (c == 0 || c == 1) return *this;
        return divexact_scalar(c);
    }

    // Substitute a ring element for one variable.
    SparsePoly substitute_value(std::size_t var, const Elem& val) const {
        unsigned dmax = degree_in(var);
        std::vector<Elem> powers(dmax + 1, ring_.one());
        for (unsigned i = 1; i <= dmax; ++i) powers[i] = ring_.mul(powers[i - 1], val);
        std::vector<Term> acc;
        acc.reserve(terms_.size());
        for (const auto& t : terms_) {
            Mono m = t.m;
            unsigned e = m[var];
            m[var] = 0;
            acc.push_back(Term{m, ring_.mul(t.c, powers[e])});
        }
        return from_terms(ring_, vars_, std::move(acc));
    }

    // Simultaneous substitution of polynomials for variables.  Entries left
    // empty keep the variable unchanged.  All images must share this domain.
    SparsePoly substitute_poly(const std::vector<std::optional<SparsePoly>>& images) const {
        if (images.size() != vars_.size()) throw Error("substitute_poly: image count mismatch");
        std::vector<std::vector<SparsePoly>> pows(vars_.size());
        for (std::size_t v = 0; v < vars_.size(); ++v) {
            if (images[v]) require_same_domain(*images[v]);
        }
        SparsePoly result(ring_, vars_);
        for (const auto& t : terms_) {
            SparsePoly term_val = constant(ring_, vars_, t.c);
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                unsigned e = t.m[v];
                if (e == 0) continue;
                if (!images[v]) {
                    Mono m = mono_zero();
                    m[v] = std::uint16_t(e);
                    term_val = term_val.mul_term(m, ring_.one());
                    continue;
                }
                term_val = term_val.mul(power_of(pows[v], *images[v], e));
            }
            result = result.add(term_val);
        }
        return result;
    }

    // rho: block[0] -> block[1] -> ... -> block[m-1] -> block[0] applied to
    // the variables, i.e. the exponent of block[i] moves to block[i+1].
    SparsePoly cyclic_shift(const std::vector<std::size_t>& block) const {
        std::vector<Term> acc;
        acc.reserve(terms_.size());
        for (const auto& t : terms_) {
            Mono m = t.m;
            for (std::size_t i = 0; i < block.size(); ++i) {
                m[block[(i + 1) % block.size()]] = t.m[block[i]];
            }
            acc.push_back(Term{m, t.c});
        }
        return from_terms(ring_, vars_, std::move(acc));
    }

    bool is_cyclic(const std::vector<std::size_t>& block) const {
        return cyclic_shift(block).equals(*this);
    }

    bool is_cyclic() const { return is_cyclic(vars_.main_block()); }

    // Partition of terms by total degree over the non-parameter block.
    std::map<unsigned, SparsePoly> homogeneous_components() const {
        std::map<unsigned, SparsePoly> out;
        for (const auto& t : terms_) {
            unsigned d = main_degree_of(t.m);
            auto it = out.find(d);
            if (it == out.end()) it = out.emplace(d, SparsePoly(ring_, vars_)).first;
            it->second.terms_.push_back(t);
        }
        // terms_ descending implies each component collected descending
        return out;
    }

    // With f = f_i + f_{i-1} + ... graded by main-block degree, returns
    // f_i - f_{i-1} + f_{i-2} - ...
    SparsePoly tilde_transform() const {
        if (terms_.empty()) return *this;
        unsigned top = degree_main();
        SparsePoly r(ring_, vars_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            unsigned d = main_degree_of(t.m);
            bool flip = ((top - d) & 1u) != 0;
            r.terms_.push_back(Term{t.m, flip ? ring_.neg(t.c) : t.c});
        }
        return r;
    }

    // Same terms under a different (equally sized) variable set; used to
    // carry a polynomial between naming schemes positionally.
    SparsePoly with_varset(VarSet vs) const {
        if (vs.size() != vars_.size()) throw DomainMismatch("with_varset: size mismatch");
        SparsePoly r(ring_, std::move(vs));
        r.terms_ = terms_;
        return r;
    }

    bool equals(const SparsePoly& g) const {
        if (!ring_.same(g.ring_) || vars_ != g.vars_) return false;
        if (terms_.size() != g.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (terms_[i].m != g.terms_[i].m) return false;
            if (!ring_.equal(terms_[i].c, g.terms_[i].c)) return false;
        }
        return true;
    }

    // Canonical text form: "vars:" header, then one term per line as
    // signed coefficient followed by the exponents, descending graded-lex.
    std::string serialize() const {
        std::ostringstream os;
        os << "vars:";
        for (const auto& n : vars_.names) os << ' ' << n;
        os << '\n';
        for (const auto& t : terms_) {
            os << ring_.to_string(t.c);
            for (std::size_t i = 0; i < vars_.size(); ++i) os << ' ' << t.m[i];
            os << '\n';
        }
        return os.str();
    }

    friend SparsePoly operator+(const SparsePoly& a, const SparsePoly& b) { return a.add(b); }
    friend SparsePoly operator-(const SparsePoly& a, const SparsePoly& b) { return a.sub(b); }
    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) { return a.mul(b); }
    friend SparsePoly operator-(const SparsePoly& a) { return a.neg(); }
    friend bool operator==(const SparsePoly& a, const SparsePoly& b) { return a.equals(b); }
    friend bool operator!=(const SparsePoly& a, const SparsePoly& b) { return !a.equals(b); }

private:
    unsigned main_degree_of(const Mono& m) const {
        unsigned s = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (!vars_.is_param(i)) s += m[i];
        return s;
    }

    void require_same_domain(const SparsePoly& g) const {
        if (!ring_.same(g.ring_))
            throw DomainMismatch("coefficient rings differ: " + ring_.describe() + " vs " +
                                 g.ring_.describe());
        if (vars_ != g.vars_) throw DomainMismatch("variable sets differ");
    }

    std::string mono_debug(const Mono& m) const {
        std::ostringstream os;
        bool any = false;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (m[i] == 0) continue;
            if (any) os << '*';
            os << vars_.names[i];
            if (m[i] > 1) os << '^' << m[i];
            any = true;
        }
        if (!any) os << '1';
        return os.str();
    }

    const SparsePoly& power_of(std::vector<SparsePoly>& cache, const SparsePoly& base,
                               unsigned e) const {
        if (cache.empty()) {
            cache.push_back(constant(ring_, vars_, ring_.one()));
            cache.push_back(base);
        }
        while (cache.size() <= e) cache.push_back(cache.back().mul(base));
        return cache[e];
    }

    void sort_terms() {
        std::size_t k = vars_.size();
        std::sort(terms_.begin(), terms_.end(),
                  [k](const Term& a, const Term& b) { return mono_cmp(a.m, b.m, k) > 0; });
    }

    void normalize() {
        sort_terms();
        std::vector<Term> out;
        out.reserve(terms_.size());
        std::size_t k = vars_.size();
        for (auto& t : terms_) {
            if (!out.empty() && mono_cmp(out.back().m, t.m, k) == 0) {
                out.back().c = ring_.add(out.back().c, t.c);
            } else {
                out.push_back(std::move(t));
            }
        }
        terms_.clear();
        for (auto& t : out) {
            if (!ring_.is_zero(t.c)) terms_.push_back(std::move(t));
        }
    }

    R ring_;
    VarSet vars_;
    std::vector<Term> terms_;
};

using PolyZZ = SparsePoly<ZZRing>;
using PolyFp = SparsePoly<FpRing>;
using PolyExt = SparsePoly<ExtRing>;

// ---------------------------------------------------------------------------
// Parsing (canonical ".poly" text format)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

template <class R>
SparsePoly<R> parse_poly(R ring, const VarSet& vars, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    bool seen_header = false;
    std::vector<typename SparsePoly<R>::Term> terms;
    std::size_t k = vars.size();
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (!seen_header) {
            if (toks[0] != "vars:")
                throw ParseError("line " + std::to_string(lineno) + ": expected vars: header");
            if (toks.size() != k + 1)
                throw ParseError("header lists " + std::to_string(toks.size() - 1) +
                                 " variables, expected " + std::to_string(k));
            for (std::size_t i = 0; i < k; ++i) {
                if (toks[i + 1] != vars.names[i])
                    throw ParseError("header variable '" + toks[i + 1] + "' != expected '" +
                                     vars.names[i] + "'");
            }
            seen_header = true;
            continue;
        }
        if (toks.size() != k + 1)
            throw ParseError("line " + std::to_string(lineno) + ": expected coefficient and " +
                             std::to_string(k) + " exponents");
        typename R::Elem c;
        if (!ring.parse_elem(toks[0], c))
            throw ParseError("line " + std::to_string(lineno) + ": bad coefficient '" + toks[0] +
                             "'");
        if (ring.is_zero(c))
            throw ParseError("line " + std::to_string(lineno) + ": zero coefficient");
        Mono m = mono_zero();
        for (std::size_t i = 0; i < k; ++i) {
            const std::string& e = toks[i + 1];
            unsigned long v = 0;
            if (e.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty exponent");
            for (char ch : e) {
                if (ch < '0' || ch > '9')
                    throw ParseError("line " + std::to_string(lineno) + ": bad exponent '" + e +
                                     "'");
                v = v * 10 + static_cast<unsigned long>(ch - '0');
                if (v > 0xffffu)
                    throw ParseError("line " + std::to_string(lineno) + ": exponent out of range");
            }
            m[i] = std::uint16_t(v);
        }
        if (!terms.empty() && mono_cmp(terms.back().m, m, k) <= 0)
            throw ParseError("line " + std::to_string(lineno) +
                             ": terms not in strictly descending order");
        terms.push_back({m, std::move(c)});
    }
    if (!seen_header) throw ParseError("missing vars: header");
    // Validation above guarantees strictly descending nonzero terms.
    return SparsePoly<R>::from_terms(ring, vars, std::move(terms));
}

// ---------------------------------------------------------------------------
// Domain conversions and evaluation
// ---------------------------------------------------------------------------

inline PolyFp reduce_mod_p(const PolyZZ& f, u64 p) {
    FpRing ring{p};
    std::vector<PolyFp::Term> terms;
    terms.reserve(f.nterms());
    for (const auto& t : f.terms()) {
        u64 c = static_cast<u64>(mod_floor(t.c, Integer(p)));
        if (c != 0) terms.push_back({t.m, c});
    }
    return PolyFp::from_terms(ring, f.vars(), std::move(terms));
}

inline PolyExt to_ext(const PolyFp& f, const FieldConfig& F) {
    if (f.ring().p != F.p) throw DomainMismatch("characteristic mismatch");
    ExtRing ring{&F};
    std::vector<PolyExt::Term> terms;
    terms.reserve(f.nterms());
    for (const auto& t : f.terms()) terms.push_back({t.m, ext_from_u64(F, t.c)});
    return PolyExt::from_terms(ring, f.vars(), std::move(terms));
}

// Exact evaluation at a point, with per-variable power tables.
inline ExtElement evaluate(const PolyFp& f, const FieldConfig& F,
                           const std::vector<ExtElement>& point) {
    if (point.size() != f.vars().size()) throw Error("evaluate: point length mismatch");
    std::size_t k = f.vars().size();
    std::vector<std::vector<ExtElement>> pows(k);
    for (std::size_t v = 0; v < k; ++v) {
        unsigned d = f.degree_in(v);
        pows[v].reserve(d + 1);
        pows[v].push_back(ext_one(F));
        for (unsigned e = 1; e <= d; ++e) pows[v].push_back(ext_mul(F, pows[v].back(), point[v]));
    }
    ExtElement acc = ext_zero(F);
    for (const auto& t : f.terms()) {
        ExtElement prod = ext_from_u64(F, t.c);
        for (std::size_t v = 0; v < k; ++v) {
            if (t.m[v]) prod = ext_mul(F, prod, pows[v][t.m[v]]);
        }
        acc = ext_add(F, acc, prod);
    }
    return acc;
}

inline ExtElement evaluate(const PolyExt& f, const std::vector<ExtElement>& point) {
    const FieldConfig& F = *f.ring().F;
    if (point.size() != f.vars().size()) throw Error("evaluate: point length mismatch");
    std::size_t k = f.vars().size();
    std::vector<std::vector<ExtElement>> pows(k);
    for (std::size_t v = 0; v < k; ++v) {
        unsigned d = f.degree_in(v);
        pows[v].reserve(d + 1);
        pows[v].push_back(ext_one(F));
        for (unsigned e = 1; e <= d; ++e) pows[v].push_back(ext_mul(F, pows[v].back(), point[v]));
    }
    ExtElement acc = ext_zero(F);
    for (const auto& t : f.terms()) {
        ExtElement prod = t.c;
        for (std::size_t v = 0; v < k; ++v) {
            if (t.m[v]) prod = ext_mul(F, prod, pows[v][t.m[v]]);
        }
        acc = ext_add(F, acc, prod);
    }
    return acc;
}

// f evaluated at the row-vector-matrix product of the main-block variables:
// variable block[i] maps to sum_j block[j] * M[j][i].
inline PolyExt substitute_linear(const PolyExt& f,
                                 const std::vector<std::vector<ExtElement>>& M) {
    const FieldConfig& F = *f.ring().F;
    auto block = f.vars().main_block();
    std::size_t n = block.size();
    if (M.size() != n) throw Error("substitute_linear: matrix size mismatch");
    for (const auto& row : M)
        if (row.size() != n) throw Error("substitute_linear: matrix not square");
    ExtRing ring{&F};
    std::vector<std::optional<PolyExt>> images(f.vars().size());
    for (std::size_t i = 0; i < n; ++i) {
        PolyExt img(ring, f.vars());
        for (std::size_t j = 0; j < n; ++j) {
            if (ext_is_zero(M[j][i])) continue;
            Mono m = mono_zero();
            m[block[j]] = 1;
            img = img.add(PolyExt::from_terms(ring, f.vars(), {{m, M[j][i]}}));
        }
        images[block[i]] = std::move(img);
    }
    return f.substitute_poly(images);
}

inline PolyExt substitute_linear(const PolyFp& f, const FieldConfig& F,
                                 const std::vector<std::vector<ExtElement>>& M) {
    return substitute_linear(to_ext(f, F), M);
}

// If every coefficient lies in the prime field, project back down.
inline std::optional<PolyFp> try_to_prime_field(const PolyExt& f) {
    const FieldConfig& F = *f.ring().F;
    FpRing ring{F.p};
    std::vector<PolyFp::Term> terms;
    terms.reserve(f.nterms());
    for (const auto& t : f.terms()) {
        for (std::size_t i = 1; i < std::size_t(F.n); ++i)
            if (t.c[i] != 0) return std::nullopt;
        terms.push_back({t.m, t.c[0]});
    }
    return PolyFp::from_terms(ring, f.vars(), std::move(terms));
}

// ---------------------------------------------------------------------------
// Rational expressions
// ---------------------------------------------------------------------------

// Fraction of two polynomials over the same domain.  `reduced` records that
// gcd(num, den) is known to be constant; freshly combined expressions leave
// it false.
template <class R>
struct RationalExpr {
    SparsePoly<R> num;
    SparsePoly<R> den;
    bool reduced = false;

    static RationalExpr of(SparsePoly<R> n, SparsePoly<R> d, bool is_reduced = false) {
        if (d.is_zero()) throw ZeroDenominator("rational expression with zero denominator");
        return RationalExpr{std::move(n), std::move(d), is_reduced};
    }

    static RationalExpr whole(SparsePoly<R> n) {
        auto one = SparsePoly<R>::constant(n.ring(), n.vars(), n.ring().one());
        return RationalExpr{std::move(n), std::move(one), true};
    }

    RationalExpr mul(const RationalExpr& o) const {
        return of(num.mul(o.num), den.mul(o.den));
    }

    RationalExpr add(const RationalExpr& o) const {
        // Prefer an exact common denominator before cross-multiplying.
        try {
            auto q = o.den.exact_div(den);
            return of(num.mul(q).add(o.num), o.den);
        } catch (const NotDivisible&) {
        }
        try {
            auto q = den.exact_div(o.den);
            return of(num.add(o.num.mul(q)), den);
        } catch (const NotDivisible&) {
        }
        return of(num.mul(o.den).add(o.num.mul(den)), den.mul(o.den));
    }

    RationalExpr sub(const RationalExpr& o) const {
        RationalExpr t{o.num.neg(), o.den, o.reduced};
        return add(t);
    }

    RationalExpr div(const RationalExpr& o) const {
        if (o.num.is_zero()) throw ZeroDenominator("division by zero rational expression");
        return of(num.mul(o.den), den.mul(o.num));
    }

    bool equals_cross(const RationalExpr& o) const {
        return num.mul(o.den).equals(o.num.mul(den));
    }

    // Strips common monomial factors, integer content (in integer mode), and
    // any of the supplied structural candidate factors that divide both
    // parts.  Marks the result reduced; with an empty candidate list this is
    // a best-effort normalization rather than a full gcd.
    RationalExpr reduce_structural(const std::vector<SparsePoly<R>>& candidates = {}) const {
        SparsePoly<R> n = num, d = den;
        if (n.is_zero()) {
            auto one = SparsePoly<R>::constant(d.ring(), d.vars(), d.ring().one());
            return RationalExpr{std::move(n), std::move(one), true};
        }
        // common monomial factor
        Mono shift = mono_zero();
        for (std::size_t v = 0; v < n.vars().size(); ++v) {
            unsigned e = std::min(n.min_exponent(v), d.min_exponent(v));
            shift[v] = std::uint16_t(e);
        }
        if (mono_total(shift, n.vars().size()) > 0) {
            auto divisor = SparsePoly<R>::from_terms(n.ring(), n.vars(), {{shift, n.ring().one()}});
            n = n.exact_div(divisor);
            d = d.exact_div(divisor);
        }
        if constexpr (std::is_same_v<R, ZZRing>) {
            Integer g = boost::multiprecision::gcd(n.content(), d.content());
            if (g > 1) {
                n = n.divexact_scalar(g);
                d = d.divexact_scalar(g);
            }
        }
        for (const auto& c : candidates) {
            if (c.is_zero() || c.degree() == 0) continue;
            while (true) {
                try {
                    auto nq = n.exact_div(c);
                    auto dq = d.exact_div(c);
                    n = std::move(nq);
                    d = std::move(dq);
                } catch (const NotDivisible&) {
                    break;
                }
            }
        }
        return RationalExpr{std::move(n), std::move(d), true};
    }
};

using RationalZZ = RationalExpr<ZZRing>;

// Substitutes rational expressions for variables.  Entries left empty keep
// the variable unchanged.  The result's denominator is the product of the
// assigned denominators raised to the per-variable degrees of f.
template <class R>
RationalExpr<R> substitute(const SparsePoly<R>& f,
                           const std::vector<std::optional<RationalExpr<R>>>& assignment) {
    if (assignment.size() != f.vars().size()) throw Error("substitute: assignment size mismatch");
    const auto& ring = f.ring();
    const auto& vars = f.vars();
    std::size_t k = vars.size();
    std::vector<unsigned> dmax(k, 0);
    for (std::size_t v = 0; v < k; ++v) {
        if (assignment[v]) {
            if (assignment[v]->den.is_zero()) throw ZeroDenominator("substitute: zero denominator");
            dmax[v] = f.degree_in(v);
        }
    }
    // Power tables for numerators and denominators.
    std::vector<std::vector<SparsePoly<R>>> npow(k), dpow(k);
    auto one = SparsePoly<R>::constant(ring, vars, ring.one());
    for (std::size_t v = 0; v < k; ++v) {
        if (!assignment[v]) continue;
        npow[v].push_back(one);
        dpow[v].push_back(one);
        for (unsigned e = 1; e <= dmax[v]; ++e) {
            npow[v].push_back(npow[v].back().mul(assignment[v]->num));
            dpow[v].push_back(dpow[v].back().mul(assignment[v]->den));
        }
    }
    SparsePoly<R> acc_num(ring, vars);
    for (const auto& t : f.terms()) {
        Mono rest = t.m;
        SparsePoly<R> term_val = SparsePoly<R>::constant(ring, vars, t.c);
        for (std::size_t v = 0; v < k; ++v) {
            if (!assignment[v]) continue;
            unsigned e = rest[v];
            rest[v] = 0;
            term_val = term_val.mul(npow[v][e]).mul(dpow[v][dmax[v] - e]);
        }
        term_val = term_val.mul_term(rest, ring.one());
        acc_num = acc_num.add(term_val);
    }
    SparsePoly<R> acc_den = one;
    for (std::size_t v = 0; v < k; ++v) {
        if (assignment[v]) acc_den = acc_den.mul(dpow[v][dmax[v]]);
    }
    return RationalExpr<R>::of(std::move(acc_num), std::move(acc_den));
}

}  // namespace permrat
