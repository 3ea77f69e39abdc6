#pragma once

#include <cstdint>

namespace permrat {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Arithmetic mod p for p < 2^63. Inputs are assumed reduced.

inline u64 addmod(u64 a, u64 b, u64 p) {
    u64 s = a + b;
    return s >= p ? s - p : s;
}

inline u64 submod(u64 a, u64 b, u64 p) {
    return a >= b ? a - b : a + p - b;
}

inline u64 mulmod(u64 a, u64 b, u64 p) {
    return static_cast<u64>(static_cast<u128>(a) * b % p);
}

inline u64 negmod(u64 a, u64 p) {
    return a == 0 ? 0 : p - a;
}

inline u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

// Inverse mod p for prime p (Fermat).
inline u64 invmod(u64 a, u64 p) {
    return powmod(a, p - 2, p);
}

// Reduce a signed value into [0, p).
inline u64 reduce_signed(i64 v, u64 p) {
    i64 m = v % static_cast<i64>(p);
    if (m < 0) m += static_cast<i64>(p);
    return static_cast<u64>(m);
}

}  // namespace permrat
