#include "permrat/derivation.h"
#include "permrat/field.h"
#include "permrat/mpoly.h"
#include "permrat/resultant.h"
#include "permrat/search.h"

#include <benchmark/benchmark.h>

#include <random>

using namespace permrat;

namespace {

PolyZZ dense_poly(const VarSet& vs, unsigned power) {
    PolyZZ acc = PolyZZ::constant(ZZRing{}, vs, Integer(1));
    for (const auto& name : vs.names)
        acc = acc + PolyZZ::variable(ZZRing{}, vs, name);
    return acc.pow(power);
}

PolyZZ random_bivariate(const VarSet& vs, unsigned dx, unsigned dy, u64 seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coeff(-50, 50);
    std::vector<PolyZZ::Term> terms;
    for (unsigned i = 0; i <= dx; ++i)
        for (unsigned j = 0; j <= dy; ++j) {
            int c = coeff(rng);
            if (c == 0) c = 1;
            Mono m = mono_zero();
            m[0] = std::uint16_t(i);
            m[1] = std::uint16_t(j);
            terms.push_back({m, Integer(c)});
        }
    return PolyZZ::from_terms(ZZRing{}, vs, std::move(terms));
}

void BM_ExtMul(benchmark::State& state) {
    FieldConfig F = make_field(7, int(state.range(0)));
    ExtElement a = find_normal_element(F);
    ExtElement b = ext_add(F, a, ext_one(F));
    for (auto _ : state) {
        b = ext_mul(F, a, b);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_ExtMul)->Arg(3)->Arg(4);

void BM_ExtInv(benchmark::State& state) {
    FieldConfig F = make_field(7, int(state.range(0)));
    ExtElement a = find_normal_element(F);
    for (auto _ : state) {
        ExtElement i = ext_inv(F, a);
        benchmark::DoNotOptimize(i);
        a = ext_add(F, i, ext_one(F));
    }
}
BENCHMARK(BM_ExtInv)->Arg(3)->Arg(4);

void BM_Frobenius(benchmark::State& state) {
    FieldConfig F = make_field(31, 3);
    ExtElement a = find_normal_element(F);
    for (auto _ : state) {
        a = frobenius(F, a);
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_Frobenius);

void BM_PolyMul(benchmark::State& state) {
    VarSet vs = make_varset({"x", "y", "z"});
    PolyZZ f = dense_poly(vs, unsigned(state.range(0)));
    for (auto _ : state) {
        PolyZZ g = f * f;
        benchmark::DoNotOptimize(g);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PolyMul)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ResultantBareiss(benchmark::State& state) {
    VarSet vs = make_varset({"x", "y"});
    unsigned d = unsigned(state.range(0));
    PolyZZ f = random_bivariate(vs, d, 2, 11);
    PolyZZ g = random_bivariate(vs, d, 2, 12);
    for (auto _ : state) {
        PolyZZ r = resultant_bareiss(f, g, 0);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_ResultantBareiss)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ResultantInterpolated(benchmark::State& state) {
    VarSet vs = make_varset({"x", "y"});
    unsigned d = unsigned(state.range(0));
    PolyZZ f = random_bivariate(vs, d, 2, 11);
    PolyZZ g = random_bivariate(vs, d, 2, 12);
    for (auto _ : state) {
        PolyZZ r = resultant(f, g, 0);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_ResultantInterpolated)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Derive3(benchmark::State& state) {
    for (auto _ : state) {
        DerivedSystem3 sys = derive_n3();
        benchmark::DoNotOptimize(sys.G);
    }
}
BENCHMARK(BM_Derive3)->Unit(benchmark::kMillisecond);

void BM_CountPoints(benchmark::State& state) {
    static DerivedSystem3 sys = derive_n3();
    u64 p = 31;
    FieldConfig F = make_field(p, 3);
    Specialized3 sp = specialize(sys, p, 6);
    MooreTransformed g1 = moore_transform(sp.G, F);
    unsigned workers = unsigned(state.range(0));
    for (auto _ : state) {
        CountRecord r = count_points({g1.g}, p, 3, "bench", workers);
        benchmark::DoNotOptimize(r.count);
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * 31 * 31 * 31);
}
BENCHMARK(BM_CountPoints)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
