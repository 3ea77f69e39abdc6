#include "permrat/mpoly.h"

#include "permrat/errors.h"
#include "permrat/field.h"

#include "doctest.h"

using namespace permrat;

namespace {

PolyZZ zpoly(const VarSet& vs, const char* name) {
    return PolyZZ::variable(ZZRing{}, vs, name);
}

PolyZZ zconst(const VarSet& vs, long c) {
    return PolyZZ::constant(ZZRing{}, vs, Integer(c));
}

Mono mono(std::initializer_list<unsigned> es) {
    Mono m = mono_zero();
    std::size_t i = 0;
    for (unsigned e : es) m[i++] = std::uint16_t(e);
    return m;
}

}  // namespace

TEST_SUITE("mpoly") {

TEST_CASE("varsets") {
    VarSet vs = make_varset({"T", "Y1", "Y2", "Y3"}, {"T"});
    CHECK(vs.size() == 4);
    CHECK(vs.is_param(0));
    CHECK_FALSE(vs.is_param(1));
    CHECK(vs.index_of("Y2") == 2);
    CHECK(vs.index_of("Z") == -1);
    CHECK(vs.main_block() == std::vector<std::size_t>{1, 2, 3});
    CHECK_THROWS_AS(make_varset({"X", "X"}), Error);
    CHECK_THROWS_AS(make_varset({"X"}, {"Y"}), Error);
}

TEST_CASE("monomial order is graded, later variables break ties") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ sq = (x + y) * (x + y);
    CHECK(sq.nterms() == 3);
    CHECK(sq.leading().m == mono({0, 2}));
    CHECK(sq.coeff(mono({1, 1})) == 2);
    CHECK(sq.terms().back().m == mono({2, 0}));

    // parameters count toward the grading
    VarSet pv = make_varset({"T", "Y"}, {"T"});
    PolyZZ t = zpoly(pv, "T"), w = zpoly(pv, "Y");
    PolyZZ f = t.pow(2) * w + w.pow(2);
    CHECK(f.leading().m == mono({2, 1}));
    CHECK(f.degree() == 3);
    CHECK(f.degree_main() == 2);
}

TEST_CASE("ring operations") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ f = x * x - y * y + zconst(vs, 3);
    PolyZZ g = x * y + zconst(vs, 1);
    PolyZZ h = x - y;
    CHECK((f + g) * h == f * h + g * h);
    CHECK(f * g == g * f);
    CHECK((f - f).is_zero());
    CHECK(f + (-f) == f - f);
    CHECK(f.scal(Integer(-2)) == -(f + f));
    CHECK(x.pow(3) == x * x * x);
    CHECK(f.pow(0) == zconst(vs, 1));

    VarSet other = make_varset({"x", "z"});
    CHECK_THROWS_AS((void)(f + zpoly(other, "z")), DomainMismatch);
}

TEST_CASE("from_terms merges and drops zeros") {
    VarSet vs = make_varset({"x"});
    using Term = PolyZZ::Term;
    PolyZZ f = PolyZZ::from_terms(ZZRing{}, vs,
                                  std::vector<Term>{{mono({1}), Integer(1)},
                                                    {mono({1}), Integer(2)},
                                                    {mono({0}), Integer(5)},
                                                    {mono({0}), Integer(-5)}});
    CHECK(f.nterms() == 1);
    CHECK(f.coeff(mono({1})) == 3);
}

TEST_CASE("exact division") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ num = x * x - y * y;
    PolyZZ den = x - y;
    CHECK(num.exact_div(den) == x + y);
    CHECK(den.divides(num));
    CHECK_FALSE(den.divides(x * x + y * y));
    CHECK_THROWS_AS((x * x + y * y).exact_div(den), NotDivisible);
    CHECK_THROWS_AS(num.exact_div(PolyZZ(ZZRing{}, vs)), NotDivisible);
}

TEST_CASE("integer content and primitive part") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ f = zpoly(vs, "x").scal(Integer(6)) + zpoly(vs, "y").scal(Integer(9));
    CHECK(f.content() == 3);
    CHECK(f.primitive_part() == zpoly(vs, "x").scal(Integer(2)) + zpoly(vs, "y").scal(Integer(3)));
    CHECK((-f).content() == 3);
    CHECK(f.divexact_scalar(Integer(3)) == f.primitive_part());
    CHECK_THROWS_AS(f.divexact_scalar(Integer(4)), NotDivisible);
    CHECK(PolyZZ(ZZRing{}, vs).content() == 0);
}

TEST_CASE("derivative") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ f = x.pow(3) * y + x.scal(Integer(2)) + zconst(vs, 7);
    CHECK(f.derivative(0) == x.pow(2) * y.scal(Integer(3)) + zconst(vs, 2));
    CHECK(f.derivative(1) == x.pow(3));
    CHECK(zconst(vs, 7).derivative(0).is_zero());
}

TEST_CASE("substitute_value") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ f = x * x * y + zconst(vs, 3);
    PolyZZ g = f.substitute_value(1, Integer(2));
    CHECK(g == x * x * y.substitute_value(1, Integer(2)) + zconst(vs, 3));
    CHECK(g.coeff(mono({2, 0})) == 2);
    CHECK(g.degree_in(1) == 0);
}

TEST_CASE("substitute_poly swaps variables") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ f = x * x + y.scal(Integer(5));
    std::vector<std::optional<PolyZZ>> images(2);
    images[0] = y;
    images[1] = x;
    CHECK(f.substitute_poly(images) == y * y + x.scal(Integer(5)));
    // empty entries keep the variable
    std::vector<std::optional<PolyZZ>> partial(2);
    partial[0] = x + zconst(vs, 1);
    PolyZZ g = f.substitute_poly(partial);
    CHECK(g == (x + zconst(vs, 1)).pow(2) + y.scal(Integer(5)));
}

TEST_CASE("cyclic shifts") {
    VarSet vs = make_varset({"x1", "x2", "x3"});
    PolyZZ x1 = zpoly(vs, "x1"), x2 = zpoly(vs, "x2"), x3 = zpoly(vs, "x3");
    PolyZZ f = x1.pow(2) * x2;
    CHECK(f.cyclic_shift({0, 1, 2}) == x2.pow(2) * x3);
    CHECK(f.cyclic_shift({0, 1, 2}).cyclic_shift({0, 1, 2}) == x3.pow(2) * x1);
    CHECK_FALSE(f.is_cyclic());
    CHECK((x1 + x2 + x3).is_cyclic());
    CHECK((x1 * x2 * x3).is_cyclic());

    // a parameter stays put under the default block
    VarSet pv = make_varset({"T", "Y1", "Y2"}, {"T"});
    PolyZZ t = zpoly(pv, "T"), y1 = zpoly(pv, "Y1"), y2 = zpoly(pv, "Y2");
    CHECK((t * (y1 + y2)).is_cyclic());
    CHECK_FALSE((t * y1).is_cyclic());
}

TEST_CASE("homogeneous components by main-block degree") {
    VarSet vs = make_varset({"T", "Y"}, {"T"});
    PolyZZ t = zpoly(vs, "T"), y = zpoly(vs, "Y");
    PolyZZ f = y * y + t.pow(5) * y + y + zconst(vs, 4);
    auto comps = f.homogeneous_components();
    REQUIRE(comps.size() == 3);
    CHECK(comps.count(0) == 1);
    CHECK(comps.count(1) == 1);
    CHECK(comps.count(2) == 1);
    CHECK(comps.at(1) == t.pow(5) * y + y);
    PolyZZ sum(ZZRing{}, vs);
    for (const auto& [d, part] : comps) {
        CHECK(part.degree_main() == d);
        sum = sum + part;
    }
    CHECK(sum == f);
}

TEST_CASE("tilde transform alternates component signs") {
    VarSet vs = make_varset({"Y"});
    PolyZZ y = zpoly(vs, "Y");
    PolyZZ f = y * y + y + zconst(vs, 1);
    CHECK(f.tilde_transform() == y * y - y + zconst(vs, 1));
    CHECK(f.tilde_transform().tilde_transform() == f);
    // only main-block degree decides the sign
    VarSet pv = make_varset({"T", "Y"}, {"T"});
    PolyZZ t = zpoly(pv, "T"), w = zpoly(pv, "Y");
    PolyZZ g = w * w + t * w + t.pow(3) * w + t;
    CHECK(g.tilde_transform() == w * w - t * w - t.pow(3) * w + t);
}

TEST_CASE("serialize and parse round trip over the integers") {
    VarSet vs = make_varset({"T", "Y1", "Y2"}, {"T"});
    PolyZZ t = zpoly(vs, "T"), y1 = zpoly(vs, "Y1"), y2 = zpoly(vs, "Y2");
    PolyZZ f = y1 * y2.scal(Integer(-7)) + t.pow(3) * y1 + zconst(vs, 123456789);
    std::string text = f.serialize();
    CHECK(text.substr(0, text.find('\n')) == "vars: T Y1 Y2");
    CHECK(parse_poly(ZZRing{}, vs, text) == f);
    CHECK(parse_poly(ZZRing{}, vs, "vars: T Y1 Y2\n").is_zero());
}

TEST_CASE("serialize and parse round trip over F_p and extensions") {
    VarSet vs = make_varset({"x", "y"});
    FpRing fp{7};
    PolyFp f = PolyFp::variable(fp, vs, "x", 3).scal(5).add(PolyFp::constant(fp, vs, 2));
    CHECK(parse_poly(fp, vs, f.serialize()) == f);

    FieldConfig F = make_field(5, 2);
    ExtRing er{&F};
    PolyExt g = PolyExt::variable(er, vs, "y", 2).scal(element_at(F, 7))
                    .add(PolyExt::constant(er, vs, ext_from_u64(F, 3)));
    CHECK(parse_poly(er, vs, g.serialize()) == g);
}

TEST_CASE("parse errors") {
    VarSet vs = make_varset({"x", "y"});
    ZZRing zz;
    CHECK_THROWS_AS(parse_poly(zz, vs, "1 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x z\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x y\n0 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x y\n1 1\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x y\n1 -1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x y\n1 70000 0\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x y\n1 1 0\n1 2 0\n"), ParseError);
    CHECK_THROWS_AS(parse_poly(zz, vs, "vars: x y\nq 1 0\n"), ParseError);
}

TEST_CASE("reduce_mod_p") {
    VarSet vs = make_varset({"x"});
    PolyZZ x = zpoly(vs, "x");
    PolyZZ f = x.scal(Integer(7)) + zconst(vs, 10) - x.pow(2);
    PolyFp g = reduce_mod_p(f, 7);
    CHECK(g.coeff(mono({1})) == 0);
    CHECK(g.nterms() == 2);
    CHECK(g.coeff(mono({0})) == 3);
    CHECK(g.coeff(mono({2})) == 6);
}

TEST_CASE("evaluation over prime and extension fields") {
    VarSet vs = make_varset({"x", "y"});
    FieldConfig F = make_field(5, 2);
    FpRing fp{5};
    PolyFp f = PolyFp::variable(fp, vs, "x", 2).add(PolyFp::variable(fp, vs, "y").scal(3));
    ExtElement a = element_at(F, 7);
    ExtElement b = element_at(F, 11);
    ExtElement want = ext_add(F, ext_mul(F, a, a), ext_scal(F, 3, b));
    CHECK(evaluate(f, F, {a, b}) == want);
    CHECK(evaluate(to_ext(f, F), {a, b}) == want);
    CHECK_THROWS_AS(evaluate(f, F, {a}), Error);
}

TEST_CASE("substitute_linear applies a matrix to the main block") {
    FieldConfig F = make_field(5, 2);
    VarSet vs = make_varset({"Y1", "Y2"});
    FpRing fp{5};
    PolyFp f = PolyFp::variable(fp, vs, "Y1");
    std::vector<std::vector<ExtElement>> M = {
        {element_at(F, 7), element_at(F, 8)},
        {element_at(F, 9), element_at(F, 11)},
    };
    PolyExt g = substitute_linear(f, F, M);
    CHECK(g.nterms() == 2);
    CHECK(g.coeff(mono({1, 0})) == M[0][0]);
    CHECK(g.coeff(mono({0, 1})) == M[1][0]);
    // composing with the inverse matrix restores the polynomial
    auto inv = ext_matrix_inverse(F, M);
    REQUIRE(inv.has_value());
    CHECK(substitute_linear(g, *inv) == to_ext(f, F));
}

TEST_CASE("try_to_prime_field") {
    FieldConfig F = make_field(5, 2);
    VarSet vs = make_varset({"x"});
    ExtRing er{&F};
    PolyExt f = PolyExt::variable(er, vs, "x").scal(ext_from_u64(F, 4));
    auto down = try_to_prime_field(f);
    REQUIRE(down.has_value());
    CHECK(down->coeff(mono({1})) == 4);
    PolyExt g = PolyExt::variable(er, vs, "x").scal(element_at(F, 1));
    CHECK_FALSE(try_to_prime_field(g).has_value());
}

TEST_CASE("rational substitution") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ f = x * x * y;
    std::vector<std::optional<RationalZZ>> assign(2);
    assign[0] = RationalZZ::of(zconst(vs, 2), zconst(vs, 3));
    assign[1] = RationalZZ::whole(zconst(vs, 3));
    RationalZZ r = substitute(f, assign);
    CHECK(r.equals_cross(RationalZZ::of(zconst(vs, 4), zconst(vs, 3))));
    RationalZZ reduced = r.reduce_structural();
    CHECK(reduced.num == zconst(vs, 4));
    CHECK(reduced.den == zconst(vs, 3));
}

TEST_CASE("min_exponent and degree_in") {
    VarSet vs = make_varset({"x", "y"});
    PolyZZ x = zpoly(vs, "x"), y = zpoly(vs, "y");
    PolyZZ f = x.pow(2) * y + x.pow(5);
    CHECK(f.degree_in(0) == 5);
    CHECK(f.degree_in(1) == 1);
    CHECK(f.min_exponent(0) == 2);
    CHECK(f.min_exponent(1) == 0);
}

TEST_CASE("with_varset renames positionally") {
    VarSet a = make_varset({"x", "y"});
    VarSet b = make_varset({"u", "v"});
    PolyZZ f = zpoly(a, "x") + zpoly(a, "y").scal(Integer(2));
    PolyZZ g = f.with_varset(b);
    CHECK(g == zpoly(b, "u") + zpoly(b, "v").scal(Integer(2)));
    CHECK_THROWS_AS(f.with_varset(make_varset({"u"})), DomainMismatch);
}

}  // TEST_SUITE
