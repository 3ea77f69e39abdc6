#include "permrat/field.h"

#include "permrat/errors.h"

#include "doctest.h"

using namespace permrat;

namespace {

// Exhaustive check that a field's multiplication has no zero divisors and
// every nonzero element inverts.
void check_field_axioms(const FieldConfig& F) {
    for (u64 i = 0; i < F.q; ++i) {
        ExtElement a = element_at(F, i);
        CHECK(index_of(F, a) == i);
        if (ext_is_zero(a)) continue;
        ExtElement inv = ext_inv(F, a);
        CHECK(ext_mul(F, a, inv) == ext_one(F));
    }
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("canonical moduli are the smallest irreducibles") {
    CHECK(make_field(2, 2).modulus == ExtElement{1, 1});     // x^2 + x + 1
    CHECK(make_field(3, 2).modulus == ExtElement{1, 0});     // x^2 + 1
    CHECK(make_field(5, 2).modulus == ExtElement{2, 0});     // x^2 + 2
    CHECK(make_field(11, 3).modulus == ExtElement{4, 1, 0});  // x^3 + x + 4
    FieldConfig F = make_field(7, 3);
    // degree <= 3 reducible iff it has a root
    for (u64 r = 0; r < 7; ++r) {
        u64 v = addmod(powmod(r, 3, 7), addmod(mulmod(F.modulus[2], mulmod(r, r, 7), 7),
                                               addmod(mulmod(F.modulus[1], r, 7),
                                                      F.modulus[0], 7),
                                               7),
                       7);
        CHECK(v != 0);
    }
}

TEST_CASE("q and q_fits_u64") {
    FieldConfig F = make_field(2, 10);
    CHECK(F.q_fits_u64);
    CHECK(F.q == 1024);
    CHECK(make_field(5, 3).q == 125);
}

TEST_CASE("small fields satisfy the field axioms") {
    check_field_axioms(make_field(2, 3));
    check_field_axioms(make_field(3, 2));
    check_field_axioms(make_field(5, 2));
    check_field_axioms(make_field(7, 2));
}

TEST_CASE("characteristic and Frobenius") {
    FieldConfig F = make_field(2, 3);
    for (u64 i = 0; i < F.q; ++i) {
        ExtElement a = element_at(F, i);
        ExtElement b = element_at(F, (i * 5 + 3) % F.q);
        // freshman's dream in characteristic 2
        CHECK(frobenius(F, ext_add(F, a, b)) ==
              ext_add(F, frobenius(F, a), frobenius(F, b)));
        CHECK(frobenius(F, a) == ext_pow(F, a, 2));
    }
    // Frobenius fixes exactly the prime field
    FieldConfig G = make_field(5, 2);
    u64 fixed = 0;
    for (u64 i = 0; i < G.q; ++i) {
        ExtElement a = element_at(G, i);
        if (frobenius(G, a) == a) ++fixed;
    }
    CHECK(fixed == 5);
}

TEST_CASE("trace is F_p-linear onto F_p with the expected fiber sizes") {
    FieldConfig F = make_field(5, 3);
    // embedded constants: trace(c) = n c
    for (u64 c = 0; c < 5; ++c) CHECK(trace(F, ext_from_u64(F, c)) == (3 * c) % 5);
    std::vector<u64> fiber(5, 0);
    for (u64 i = 0; i < F.q; ++i) ++fiber[trace(F, element_at(F, i))];
    for (u64 t = 0; t < 5; ++t) CHECK(fiber[t] == 25);
}

TEST_CASE("element enumeration is lexicographic on coordinates") {
    FieldConfig F = make_field(3, 2);
    CHECK(element_at(F, 0) == ExtElement{0, 0});
    CHECK(element_at(F, 1) == ExtElement{0, 1});
    CHECK(element_at(F, 3) == ExtElement{1, 0});  // c_0 is most significant
    CHECK(element_at(F, 8) == ExtElement{2, 2});
}

TEST_CASE("string round trip and parse errors") {
    FieldConfig F = make_field(7, 3);
    ExtElement a{3, 0, 6};
    CHECK(ext_to_string(a) == "3,0,6");
    CHECK(ext_parse(F, "3,0,6") == a);
    CHECK_THROWS_AS(ext_parse(F, "3,0"), ParseError);
    CHECK_THROWS_AS(ext_parse(F, "3,0,7"), ParseError);
    CHECK_THROWS_AS(ext_parse(F, "3,x,1"), ParseError);
}

TEST_CASE("ext_inv rejects zero") {
    FieldConfig F = make_field(3, 2);
    CHECK_THROWS_AS(ext_inv(F, ext_zero(F)), NotInvertible);
}

TEST_CASE("artin_schreier_solve") {
    FieldConfig F = make_field(5, 3);
    for (u64 i = 0; i < F.q; ++i) {
        ExtElement c = element_at(F, i);
        if (trace(F, c) != 0) {
            CHECK_THROWS_AS(artin_schreier_solve(F, c), NoSolution);
            continue;
        }
        ExtElement x = artin_schreier_solve(F, c);
        CHECK(ext_sub(F, frobenius(F, x), x) == c);
        CHECK(x[0] == 0);  // canonical representative
    }
}

TEST_CASE("Moore matrices detect normal elements") {
    FieldConfig F = make_field(3, 3);
    // 1 is never normal for n > 1: all columns coincide
    CHECK_FALSE(moore_matrix(F, ext_one(F)).invertible);

    ExtElement z = find_normal_element(F);
    MooreMatrix M = moore_matrix(F, z);
    REQUIRE(M.invertible);
    CHECK_FALSE(ext_is_zero(M.det));
    // inverse really inverts
    for (int i = 0; i < F.n; ++i) {
        for (int j = 0; j < F.n; ++j) {
            ExtElement s = ext_zero(F);
            for (int k = 0; k < F.n; ++k)
                s = ext_add(F, s, ext_mul(F, M.entries[i][k], M.inverse[k][j]));
            CHECK(s == (i == j ? ext_one(F) : ext_zero(F)));
        }
    }
    // the inverse is itself a Moore matrix when w is reported
    if (M.w) {
        MooreMatrix W = moore_matrix(F, *M.w);
        CHECK(W.entries == M.inverse);
    }
    // entries follow the conjugate pattern
    for (int i = 0; i < F.n; ++i)
        for (int j = 0; j < F.n; ++j) {
            ExtElement e = z;
            for (int k = 0; k < (i + j) % F.n; ++k) e = frobenius(F, e);
            CHECK(M.entries[i][j] == e);
        }
}

TEST_CASE("generic determinant and inverse over extension fields") {
    FieldConfig F = make_field(5, 2);
    std::vector<std::vector<ExtElement>> m = {
        {ext_from_u64(F, 2), element_at(F, 7)},
        {element_at(F, 3), ext_from_u64(F, 4)},
    };
    ExtElement det = ext_matrix_det(F, m);
    auto inv = ext_matrix_inverse(F, m);
    REQUIRE(inv.has_value());
    ExtElement prod = ext_sub(F, ext_mul(F, m[0][0], (*inv)[0][0]),
                              ext_neg(F, ext_mul(F, m[0][1], (*inv)[1][0])));
    CHECK(prod == ext_one(F));
    // singular matrix: repeated rows
    CHECK_FALSE(ext_matrix_inverse(F, {m[0], m[0]}).has_value());
    CHECK(ext_is_zero(ext_matrix_det(F, {m[0], m[0]})));
    (void)det;
}

}  // TEST_SUITE
