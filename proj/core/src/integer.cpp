#include "permrat/integer.h"

#include <stdexcept>

namespace permrat {

Integer ipow(const Integer& v, unsigned e) {
    Integer acc = 1;
    Integer base = v;
    while (e) {
        if (e & 1u) acc *= base;
        base *= base;
        e >>= 1u;
    }
    return acc;
}

Integer iroot(const Integer& v, unsigned k) {
    if (v < 0) throw std::invalid_argument("iroot: negative radicand");
    if (k == 0) throw std::invalid_argument("iroot: zero index");
    if (v == 0 || v == 1 || k == 1) return v;
    // Newton's iteration with a power-of-two initial guess from the bit
    // length, then a final downward correction.
    unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
    Integer x = Integer(1) << (bits / k + 1);
    while (true) {
        // x_{k+1} = ((k-1)x + v / x^(k-1)) / k
        Integer xk1 = ipow(x, k - 1);
        Integer nx = ((k - 1) * x + v / xk1) / k;
        if (nx >= x) break;
        x = nx;
    }
    while (ipow(x, k) > v) --x;
    while (ipow(x + 1, k) <= v) ++x;
    return x;
}

}  // namespace permrat
