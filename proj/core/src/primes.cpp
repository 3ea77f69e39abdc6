#include "permrat/primes.h"

#include <cstring>
#include <vector>

#include "permrat/errors.h"

namespace permrat {

namespace {

bool mr_witness(u64 a, u64 d, int s, u64 n) {
    a %= n;
    if (a == 0) return false;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < s; i++) {
        x = mulmod(x, x, n);
        if (x == n - 1) return false;
    }
    return true;  // composite witness
}

}  // namespace

bool is_prime(u64 m) {
    if (m < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (m == p) return true;
        if (m % p == 0) return false;
    }
    u64 d = m - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        s++;
    }
    // This base set decides primality for all n < 2^64 (Sorenson & Webster).
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (mr_witness(a, d, s, m)) return false;
    }
    return true;
}

u64 next_prime(u64 m) {
    if (m <= 2) return 2;
    u64 c = m | 1;
    while (!is_prime(c)) c += 2;
    return c;
}

u64 prime_index(u64 m, u64 budget) {
    if (!is_prime(m)) throw NotPrime("prime_index: argument is not prime");
    if (m > budget) throw SieveBudgetExceeded("prime_index: sieve budget exceeded");
    if (m == 2) return 1;

    // Base primes up to sqrt(m).
    u64 lim = 1;
    while (lim * lim < m) lim++;
    std::vector<u64> base;
    {
        std::vector<bool> sieve(lim + 1, true);
        for (u64 i = 2; i <= lim; i++) {
            if (sieve[i]) {
                base.push_back(i);
                for (u64 j = i * i; j <= lim; j += i) sieve[j] = false;
            }
        }
    }

    // Segmented sieve over odd numbers in [3, m].
    const u64 kSegBits = 1u << 22;  // odds per segment
    std::vector<std::uint8_t> seg(kSegBits);
    u64 count = 1;  // the prime 2
    for (u64 lo = 3; lo <= m; lo += 2 * kSegBits) {
        u64 hi = lo + 2 * kSegBits - 2;  // last odd in segment
        if (hi > m) hi = m | 1;
        u64 nodds = (hi - lo) / 2 + 1;
        std::memset(seg.data(), 1, nodds);
        for (u64 p : base) {
            if (p == 2) continue;
            if (p * p > hi) break;
            u64 start = p * p;
            if (start < lo) {
                u64 k = (lo + p - 1) / p;
                if ((k & 1) == 0) k++;
                start = k * p;
            }
            for (u64 v = start; v <= hi; v += 2 * p) seg[(v - lo) / 2] = 0;
        }
        for (u64 i = 0; i < nodds; i++) {
            if (seg[i] && lo + 2 * i <= m) count++;
        }
    }
    return count;
}

}  // namespace permrat
