#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace permrat {

// Arbitrary-precision signed integer used for all exact coefficient
// arithmetic.  cpp_int is header-only and allocation-free for small values,
// which covers the vast majority of coefficients that appear here.
using Integer = boost::multiprecision::cpp_int;

inline std::string int_to_string(const Integer& v) { return v.str(); }

inline Integer int_parse(const std::string& s) { return Integer(s); }

// Floor division and the matching remainder (sign follows the divisor).
// cpp_int's operator/ truncates toward zero, which is the wrong convention
// for balanced lifting, so these exist as named helpers.
inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Integer mod_floor(const Integer& a, const Integer& b) {
    return a - floor_div(a, b) * b;
}

// Reduce a modulo m into the symmetric range (-m/2, m/2].
inline Integer symmetric_mod(const Integer& a, const Integer& m) {
    Integer r = mod_floor(a, m);
    if (2 * r > m) r -= m;
    return r;
}

// Exact integer k-th root: largest r >= 0 with r^k <= v.  v must be >= 0.
Integer iroot(const Integer& v, unsigned k);

// v^e for small exponents.
Integer ipow(const Integer& v, unsigned e);

}  // namespace permrat
