#include "permrat/search.h"

#include "permrat/errors.h"

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "shared.h"

using namespace permrat;

namespace {

ProblemInstance instance(u64 p, int n, u64 b0) {
    FieldConfig F = make_field(p, n);
    return make_instance(F, ext_from_u64(F, b0));
}

// f_b straight from the definition, as an independent reference.
ExtElement fb_reference(const ProblemInstance& inst, const ExtElement& x) {
    const FieldConfig& F = inst.cfg;
    ExtElement den = ext_add(F, ext_sub(F, ext_pow(F, x, F.p), x), inst.b);
    return ext_add(F, x, ext_inv(F, den));
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("instances and the map itself") {
    ProblemInstance inst = instance(5, 2, 1);
    CHECK(inst.t == 4);  // trace(1) = 2 over a quadratic extension
    for (u64 i = 0; i < inst.cfg.q; ++i) {
        ExtElement x = element_at(inst.cfg, i);
        CHECK(apply_fb(inst, x) == fb_reference(inst, x));
    }
    FieldConfig F = make_field(5, 2);
    CHECK_THROWS_AS(make_instance(F, ext_zero(F)), ZeroTrace);
    // trace(c) = 2c vanishes only at c = 0 here, but a genuine trace-zero
    // extension element exists
    bool threw = false;
    for (u64 i = 1; i < F.q; ++i) {
        ExtElement b = element_at(F, i);
        if (trace(F, b) != 0) continue;
        CHECK_THROWS_AS(make_instance(F, b), ZeroTrace);
        threw = true;
        break;
    }
    CHECK(threw);
}

TEST_CASE("image scans") {
    PermutationScan yes = is_permutation(instance(5, 2, 1));
    CHECK(yes.is_permutation);
    CHECK(yes.domain == 25);
    CHECK(yes.image_size == 25);

    PermutationScan no = is_permutation(instance(5, 2, 2));
    CHECK_FALSE(no.is_permutation);
    CHECK(no.image_size < no.domain);

    CHECK_THROWS_AS(is_permutation(instance(5, 3, 1), /*budget=*/100), BudgetExceeded);
}

TEST_CASE("classification over the quadratic extension of F_5") {
    Classification c = classify_all_b(5, 2, /*extras_per_class=*/2, /*seed=*/1);
    CHECK(c.p == 5);
    CHECK(c.n == 2);
    CHECK(c.modulus == "2,0");
    CHECK(c.seed == 1);
    REQUIRE(c.verdict_by_trace.size() == 4);
    CHECK(c.verdict_by_trace.at(1) == true);
    CHECK(c.verdict_by_trace.at(2) == false);
    CHECK(c.verdict_by_trace.at(3) == false);
    CHECK(c.verdict_by_trace.at(4) == true);
    CHECK(c.consistent_within_class);
    CHECK(c.entries.size() >= 4);
    for (const auto& e : c.entries) {
        CHECK(e.trace_class != 0);
        CHECK(e.is_pr == c.verdict_by_trace.at(e.trace_class));
    }
}

TEST_CASE("small characteristic always permutes") {
    Classification c3 = classify_all_b(3, 4, 1, 1);
    for (const auto& [tr, pr] : c3.verdict_by_trace) CHECK(pr);
    CHECK(c3.consistent_within_class);

    Classification c2 = classify_all_b(2, 5, 1, 1);
    for (const auto& [tr, pr] : c2.verdict_by_trace) CHECK(pr);
    CHECK(c2.consistent_within_class);

    CHECK_THROWS_AS(classify_all_b(5, 3, 2, 1, /*budget=*/1000), BudgetExceeded);
}

TEST_CASE("brute-force collisions match the permutation verdict") {
    // cubic extension of F_5: never a permutation, so a collision exists
    ProblemInstance bad = instance(5, 3, 1);
    CHECK_FALSE(is_permutation(bad).is_permutation);
    Witness w = find_collision_brute(bad);
    CHECK(w.method == WitnessMethod::brute);
    validate_witness(bad, w);
    CHECK_FALSE(ext_is_zero(w.y));
    CHECK(apply_fb(bad, ext_add(bad.cfg, w.x, w.y)) == apply_fb(bad, w.x));

    // cubic extension of F_3: a permutation for every admissible b
    FieldConfig F3 = make_field(3, 3);
    for (u64 i = 1; i < F3.q && i < 6; ++i) {
        ExtElement b = element_at(F3, i);
        if (trace(F3, b) == 0) continue;
        ProblemInstance good = make_instance(F3, b);
        CHECK(is_permutation(good).is_permutation);
        CHECK_THROWS_AS(find_collision_brute(good), NotFound);
    }
}

TEST_CASE("variety witnesses for cubic extensions") {
    const DerivedSystem3& sys = test_sys3();
    for (u64 p : {5, 7, 11, 13}) {
        CAPTURE(p);
        ProblemInstance inst = instance(p, 3, 1);
        Witness w = variety_witness(inst, sys);
        CHECK(w.method == WitnessMethod::variety);
        validate_witness(inst, w);
        CHECK(apply_fb(inst, ext_add(inst.cfg, w.x, w.y)) == apply_fb(inst, w.x));
        // agrees with brute force about existence
        Witness bw = find_collision_brute(inst);
        validate_witness(inst, bw);
    }
    // even characteristic is out of scope for the square-root construction
    CHECK_THROWS_AS(variety_witness(instance(2, 3, 1), sys), Error);
}

TEST_CASE("variety witnesses for quartic extensions") {
    const DerivedSystem4& sys = test_sys4();
    for (u64 p : {5, 7}) {
        CAPTURE(p);
        FieldConfig F = make_field(p, 4);
        ExtElement half = ext_inv(F, ext_from_u64(F, 2));
        ProblemInstance inst = make_instance(F, half);
        CHECK(inst.t == 4 % p);
        Witness w = variety_witness(inst, sys);
        CHECK(w.method == WitnessMethod::variety);
        validate_witness(inst, w);
        CHECK(apply_fb(inst, ext_add(F, w.x, w.y)) == apply_fb(inst, w.x));
    }
    // the quartic path is specific to b = 1/2
    FieldConfig F = make_field(5, 4);
    ProblemInstance other = make_instance(F, ext_from_u64(F, 1));
    CHECK_THROWS_AS(variety_witness(other, sys), Error);
}

TEST_CASE("witness validation rejects tampering") {
    ProblemInstance inst = instance(5, 3, 1);
    Witness w = find_collision_brute(inst);
    validate_witness(inst, w);
    Witness bad = w;
    bad.delta = ext_add(inst.cfg, bad.delta, ext_one(inst.cfg));
    CHECK_THROWS_AS(validate_witness(inst, bad), ReconstructionFailure);
    Witness wrongz = w;
    wrongz.z = ext_add(inst.cfg, wrongz.z, ext_one(inst.cfg));
    CHECK_THROWS_AS(validate_witness(inst, wrongz), ReconstructionFailure);
    Witness zero = w;
    zero.y = ext_zero(inst.cfg);
    CHECK_THROWS_AS(validate_witness(inst, zero), ReconstructionFailure);
}

TEST_CASE("point counts over hyperplanes") {
    VarSet vs = make_varset({"Y1", "Y2", "Y3"});
    FpRing fp{5};
    PolyFp plane = PolyFp::variable(fp, vs, "Y1")
                       .add(PolyFp::variable(fp, vs, "Y2"))
                       .add(PolyFp::variable(fp, vs, "Y3"));
    CountRecord r = count_points({plane}, 5, 3, "hyperplane");
    CHECK(r.count == 25);
    CHECK(r.p_squared == 25);
    CHECK(r.id == "hyperplane");
    CHECK(r.degree == 0);
    // worker partitioning never changes the result
    for (unsigned w : {1u, 2u, 8u}) {
        CHECK(count_points({plane}, 5, 3, "hyperplane", w).count == 25);
    }
    CHECK_THROWS_AS(count_points({plane}, 5, 3, "x", 0, /*budget=*/10), BudgetExceeded);
    CHECK_THROWS_AS(count_points({plane}, 5, 2, "x"), DomainMismatch);
    CHECK_THROWS_AS(count_points({}, 5, 3, "x"), Error);

    // parameters must be eliminated before counting
    VarSet pv = make_varset({"T", "Y1"}, {"T"});
    PolyFp withparam = PolyFp::variable(fp, pv, "T").add(PolyFp::variable(fp, pv, "Y1"));
    CHECK_THROWS_AS(count_points({withparam}, 5, 1, "x"), DomainMismatch);
}

TEST_CASE("moore transform keeps cyclic polynomials rational") {
    const DerivedSystem3& sys = test_sys3();
    Specialized3 sp = specialize(sys, 7, 6);
    MooreTransformed g1 = moore_transform(sp.G, make_field(7, 3));
    CHECK(g1.g.vars() == sp.G.vars());
    // Q is not cyclic, so its image leaks into the extension
    CHECK_THROWS_AS(moore_transform(sp.Q, make_field(7, 3)), CoefficientLeak);
    MooreImage q1 = moore_transform_ext(sp.Q, make_field(7, 3));
    CHECK(q1.z == g1.z);
    CHECK_FALSE(try_to_prime_field(q1.g).has_value());
}

TEST_CASE("transformed counts match a direct scan of the variety") {
    const DerivedSystem3& sys = test_sys3();
    FieldConfig F = make_field(7, 3);
    u64 p = 7;

    for (u64 t : {6, 2}) {
        CAPTURE(t);
        Specialized3 sp = specialize(sys, p, t);
        MooreTransformed g1 = moore_transform(sp.G, F);
        MooreImage q1 = moore_transform_ext(sp.Q, F);

        CountRecord g_only = count_points({g1.g}, p, 3, "g", 0, kCountBudget, 18);
        CountRecord both = count_points_joint({g1.g}, {q1.g}, F, 3, "gq");

        // reference: scan y in F_{p^3} directly on the untransformed system
        PolyExt Ge = to_ext(reduce_mod_p(sys.G, p), F);
        PolyExt Qe = to_ext(reduce_mod_p(sys.Q, p), F);
        std::vector<ExtElement> pt(4, ext_zero(F));
        pt[0] = ext_from_u64(F, t);
        u64 g_ref = 0, q_zero_ref = 0;
        for (u64 i = 0; i < F.q; ++i) {
            pt[1] = element_at(F, i);
            pt[2] = frobenius(F, pt[1]);
            pt[3] = frobenius(F, pt[2]);
            if (!ext_is_zero(evaluate(Ge, pt))) continue;
            ++g_ref;
            if (ext_is_zero(evaluate(Qe, pt))) ++q_zero_ref;
        }
        CHECK(g_only.count == g_ref);
        CHECK(both.count == q_zero_ref);

        if (t == 6) {
            CHECK(g_only.count == 61);
            CHECK(both.count == 1);
        } else {
            CHECK(g_only.count == 31);
            CHECK(both.count == 7);
        }

        for (unsigned w : {1u, 2u, 8u})
            CHECK(count_points_joint({g1.g}, {q1.g}, F, 3, "gq", w).count == both.count);
    }
}

TEST_CASE("lang-weil bound fields at desk scale") {
    const DerivedSystem3& sys = test_sys3();
    FieldConfig F = make_field(7, 3);
    Specialized3 sp = specialize(sys, 7, 6);
    MooreTransformed g1 = moore_transform(sp.G, F);
    CountRecord r = count_points({g1.g}, 7, 3, "g", 0, kCountBudget, 18);
    CHECK(r.degree == 18);
    CHECK(r.bound_coeff == 272);
    CHECK(r.bound_vacuous);
    CHECK(r.bound_lo == "-9634011.711");
    CHECK(r.bound_hi == "-9634011.711");
}

TEST_CASE("lang-weil thresholds") {
    CHECK(lang_weil_coeff(18) == 272);
    CHECK(lang_weil_coeff(46) == 1980);

    Threshold t18 = lang_weil_threshold(18, lang_weil_coeff(18));
    CHECK(t18.least_admissible == 1734081);
    CHECK(t18.least_prime == 1734097);
    CHECK(t18.prime_ordinal == 130492);
    CHECK(t18.c_lo == "1375898.742989");
    CHECK(t18.c_hi == "1375898.742994");
    CHECK(t18.bracket_with_coeff_minus_1 == "1732763.97");
    CHECK(t18.bracket_with_coeff == "1734080.56");

    Threshold t46 = lang_weil_threshold(46, lang_weil_coeff(46));
    CHECK(t46.least_admissible == 100018660);
    CHECK(t46.least_prime == 100018663);
    CHECK(t46.prime_ordinal == 5762458);

    CHECK_THROWS_AS(lang_weil_threshold(2, Integer(0)), DegreeOutOfRange);
}

TEST_CASE("json records") {
    ProblemInstance inst = instance(5, 3, 1);
    Witness w = find_collision_brute(inst);
    auto jw = nlohmann::json::parse(witness_to_json(inst, w));
    CHECK(jw.at("schema") == 1);
    CHECK(jw.at("record") == "witness");
    CHECK(jw.at("instance").at("p") == 5);
    CHECK(jw.at("instance").at("n") == 3);
    CHECK(jw.at("method") == "brute");

    auto js = nlohmann::json::parse(scan_to_json(inst, is_permutation(inst)));
    CHECK(js.at("record") == "permutation_scan");
    CHECK(js.at("is_permutation") == false);

    auto jc = nlohmann::json::parse(classification_to_json(classify_all_b(5, 2, 1, 9)));
    CHECK(jc.at("record") == "classification");
    CHECK(jc.at("seed") == 9);
    CHECK(jc.at("modulus") == "2,0");

    VarSet vs = make_varset({"Y1"});
    PolyFp line = PolyFp::variable(FpRing{5}, vs, "Y1");
    auto jr = nlohmann::json::parse(count_to_json(count_points({line}, 5, 1, "line")));
    CHECK(jr.at("record") == "count");
    CHECK(jr.at("count") == 1);

    auto jt = nlohmann::json::parse(threshold_to_json(lang_weil_threshold(18, Integer(272))));
    CHECK(jt.at("record") == "threshold");
    CHECK(jt.at("least_prime") == 1734097);
}

}  // TEST_SUITE
