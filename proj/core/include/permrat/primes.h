#pragma once

#include <cstdint>

#include "permrat/fp64.h"

namespace permrat {

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 m);

// Smallest prime >= m.
u64 next_prime(u64 m);

// Ordinal of the prime m (prime_index(2) == 1), by segmented sieve.
// Throws NotPrime if m is not prime, SieveBudgetExceeded if m > budget.
u64 prime_index(u64 m, u64 budget = 200'000'000);

}  // namespace permrat
