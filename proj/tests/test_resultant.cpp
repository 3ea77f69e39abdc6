#include "permrat/resultant.h"

#include "permrat/errors.h"

#include <random>

#include "doctest.h"

using namespace permrat;

namespace {

PolyZZ zvar(const VarSet& vs, const char* name, unsigned e = 1) {
    return PolyZZ::variable(ZZRing{}, vs, name, e);
}

PolyZZ zc(const VarSet& vs, long c) {
    return PolyZZ::constant(ZZRing{}, vs, Integer(c));
}

PolyZZ random_poly(const VarSet& vs, std::mt19937_64& rng, unsigned dx, unsigned dy) {
    std::uniform_int_distribution<int> coeff(-9, 9);
    std::vector<PolyZZ::Term> terms;
    for (unsigned i = 0; i <= dx; ++i) {
        for (unsigned j = 0; j <= dy; ++j) {
            int c = coeff(rng);
            if (c == 0) continue;
            Mono m = mono_zero();
            m[0] = std::uint16_t(i);
            m[1] = std::uint16_t(j);
            terms.push_back({m, Integer(c)});
        }
    }
    return PolyZZ::from_terms(ZZRing{}, vs, std::move(terms));
}

}  // namespace

TEST_SUITE("resultant") {

TEST_CASE("coeff_in_var") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ f = zvar(vs, "x", 2) * zvar(vs, "y") + zvar(vs, "x").scal(Integer(3)) + zc(vs, 5);
    CHECK(coeff_in_var(f, 0, 2) == zvar(vs, "y"));
    CHECK(coeff_in_var(f, 0, 1) == zc(vs, 3));
    CHECK(coeff_in_var(f, 0, 0) == zc(vs, 5));
    CHECK(coeff_in_var(f, 0, 7).is_zero());
}

TEST_CASE("sylvester matrix shape") {
    VarSet vs = make_varset({"x"});
    PolyZZ f = zvar(vs, "x", 2) + zc(vs, 1);
    PolyZZ g = zvar(vs, "x", 3) - zc(vs, 2);
    auto M = sylvester_matrix(f, g, 0);
    REQUIRE(M.size() == 5);
    for (const auto& row : M) CHECK(row.size() == 5);
}

TEST_CASE("constant resultants") {
    VarSet vs = make_varset({"x"});
    PolyZZ a = zvar(vs, "x", 2) + zc(vs, 1);
    PolyZZ b = zvar(vs, "x", 2) - zc(vs, 1);
    CHECK(resultant_bareiss(a, b, 0) == zc(vs, 4));
    CHECK(resultant(a, b, 0) == zc(vs, 4));
    // shared root forces a zero resultant
    PolyZZ c = (zvar(vs, "x") - zc(vs, 1)) * (zvar(vs, "x") + zc(vs, 3));
    PolyZZ d = (zvar(vs, "x") - zc(vs, 1)) * (zvar(vs, "x") - zc(vs, 5));
    CHECK(resultant_bareiss(c, d, 0).is_zero());
    CHECK(resultant(c, d, 0).is_zero());
}

TEST_CASE("symbolic 1x1 classics") {
    VarSet vs = make_varset({"x", "a", "b", "c", "d"});
    PolyZZ x = zvar(vs, "x");
    PolyZZ f = zvar(vs, "a") * x + zvar(vs, "b");
    PolyZZ g = zvar(vs, "c") * x + zvar(vs, "d");
    PolyZZ want = zvar(vs, "a") * zvar(vs, "d") - zvar(vs, "b") * zvar(vs, "c");
    CHECK(resultant_bareiss(f, g, 0) == want);
    CHECK(resultant(f, g, 0) == want);
}

TEST_CASE("discriminants") {
    VarSet vs = make_varset({"x", "b", "c"});
    PolyZZ f = zvar(vs, "x", 2) + zvar(vs, "b") * zvar(vs, "x") + zvar(vs, "c");
    PolyZZ want = zvar(vs, "b", 2) - zvar(vs, "c").scal(Integer(4));
    CHECK(discriminant(f, 0) == want);
    CHECK(discriminant_bareiss(f, 0) == want);

    VarSet uv = make_varset({"x"});
    PolyZZ g = (zvar(uv, "x") - zc(uv, 1)) * (zvar(uv, "x") - zc(uv, 2)) *
               (zvar(uv, "x") - zc(uv, 3));
    // prod of squared root differences: (1*2*1)^2 = 4
    CHECK(discriminant(g, 0) == zc(uv, 4));
    CHECK(discriminant_bareiss(g, 0) == zc(uv, 4));
    CHECK_THROWS_AS(discriminant_bareiss(zc(uv, 3), 0), Error);
}

TEST_CASE("multiplicativity in the first argument") {
    VarSet vs = make_varset({"x", "y"});
    std::mt19937_64 rng(42);
    PolyZZ f = random_poly(vs, rng, 2, 1);
    PolyZZ g = random_poly(vs, rng, 2, 2);
    PolyZZ h = random_poly(vs, rng, 1, 2);
    REQUIRE(f.degree_in(0) >= 1);
    REQUIRE(g.degree_in(0) >= 1);
    REQUIRE(h.degree_in(0) >= 1);
    CHECK(resultant_bareiss(f * h, g, 0) ==
          resultant_bareiss(f, g, 0) * resultant_bareiss(h, g, 0));
}

TEST_CASE("interpolation path agrees with Bareiss on random inputs") {
    VarSet vs = make_varset({"x", "y"});
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        PolyZZ f = random_poly(vs, rng, 3, 2);
        PolyZZ g = random_poly(vs, rng, 2, 3);
        if (f.degree_in(0) == 0 || g.degree_in(0) == 0) continue;
        CHECK(resultant(f, g, 0) == resultant_bareiss(f, g, 0));
        CHECK(resultant(f, g, 1) == resultant_bareiss(f, g, 1));
    }
}

TEST_CASE("prime-field resultants") {
    VarSet vs = make_varset({"x", "y"});
    FpRing fp{13};
    PolyFp f = PolyFp::variable(fp, vs, "x", 2).add(PolyFp::variable(fp, vs, "y"));
    PolyFp g = PolyFp::variable(fp, vs, "x").add(PolyFp::constant(fp, vs, 5));
    // Res_x(x^2 + y, x + 5) = 25 + y = 12 + y mod 13
    PolyFp r = resultant(f, g, 0);
    CHECK(r == PolyFp::variable(fp, vs, "y").add(PolyFp::constant(fp, vs, 12)));
}

TEST_CASE("bareiss determinant handles zero pivots") {
    VarSet vs = make_varset({"x"});
    ZZRing zz;
    auto Z = PolyZZ(zz, vs);
    auto one = zc(vs, 1);
    // [[0,1],[1,0]] needs a row swap and picks up the sign
    std::vector<std::vector<PolyZZ>> M = {{Z, one}, {one, Z}};
    CHECK(bareiss_determinant(M, zz, vs) == zc(vs, -1));
    // singular matrix
    std::vector<std::vector<PolyZZ>> S = {{one, one}, {one, one}};
    CHECK(bareiss_determinant(S, zz, vs).is_zero());
}

}  // TEST_SUITE
