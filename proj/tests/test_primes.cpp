#include "permrat/primes.h"

#include "permrat/errors.h"

#include "doctest.h"

using namespace permrat;

TEST_SUITE("primes") {

TEST_CASE("is_prime agrees with trial division below 10000") {
    auto trial = [](u64 m) {
        if (m < 2) return false;
        for (u64 d = 2; d * d <= m; ++d)
            if (m % d == 0) return false;
        return true;
    };
    for (u64 m = 0; m < 10000; ++m) CHECK(is_prime(m) == trial(m));
}

TEST_CASE("is_prime on 64-bit witnesses") {
    CHECK(is_prime(18446744073709551557ull));
    CHECK_FALSE(is_prime(18446744073709551556ull));
    CHECK(is_prime(2'147'483'647));            // 2^31 - 1
    CHECK_FALSE(is_prime(3'215'031'751ull));   // strong pseudoprime to 2,3,5,7
}

TEST_CASE("next_prime") {
    CHECK(next_prime(0) == 2);
    CHECK(next_prime(2) == 2);
    CHECK(next_prime(90) == 97);
    CHECK(next_prime(1734081) == 1734097);
    CHECK(next_prime(100018660) == 100018663);
}

TEST_CASE("prime_index ordinals") {
    CHECK(prime_index(2) == 1);
    CHECK(prime_index(3) == 2);
    CHECK(prime_index(13) == 6);
    CHECK(prime_index(104729) == 10000);
    CHECK(prime_index(1734097) == 130492);
    CHECK_THROWS_AS(prime_index(15), NotPrime);
    CHECK_THROWS_AS(prime_index(1734097, 100), SieveBudgetExceeded);
}

}  // TEST_SUITE
