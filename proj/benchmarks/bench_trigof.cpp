#include "trigof/gof.hpp"
#include "trigof/hconst.hpp"
#include "trigof/power.hpp"
#include "trigof/scaling.hpp"

#include <benchmark/benchmark.h>

using namespace trigof;

namespace {

void BM_FitGamma(benchmark::State& state) {
    const Sample x = sample(FamilyId::gamma, {2.5, 1.0}, static_cast<std::size_t>(state.range(0)), 1);
    const auto mask = KnownMask::none(FamilyId::gamma);
    for (auto _ : state) benchmark::DoNotOptimize(fit(FamilyId::gamma, EstimatorKind::ml, mask, x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitGamma)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_FitEpd(benchmark::State& state) {
    const Sample x = sample(FamilyId::epd, {1.5, 0.0, 1.0}, static_cast<std::size_t>(state.range(0)), 2);
    const auto mask = KnownMask::none(FamilyId::epd);
    for (auto _ : state) benchmark::DoNotOptimize(fit(FamilyId::epd, EstimatorKind::ml, mask, x));
}
BENCHMARK(BM_FitEpd)->Arg(100)->Arg(1000)->Arg(10000);

void BM_RunTest(benchmark::State& state) {
    const auto fam = static_cast<FamilyId>(state.range(0));
    const ParamVector theta = fam == FamilyId::student_t ? ParamVector{5.0, 0.0, 1.0} : ParamVector{0.0, 1.0};
    const Sample x = sample(fam, theta, 500, 3);
    const auto mask = KnownMask::none(fam);
    for (auto _ : state) benchmark::DoNotOptimize(run_test(fam, EstimatorKind::ml, mask, x));
    state.SetLabel(std::string(family_name(fam)));
}
BENCHMARK(BM_RunTest)
    ->Arg(static_cast<int>(FamilyId::normal))
    ->Arg(static_cast<int>(FamilyId::laplace))
    ->Arg(static_cast<int>(FamilyId::gumbel))
    ->Arg(static_cast<int>(FamilyId::student_t));

// Uncached Sigma: every h constant is re-integrated.
void BM_SigmaCold(benchmark::State& state) {
    double lam = 1.25;
    for (auto _ : state) {
        hconst::clear_cache();
        lam += 1e-6;
        benchmark::DoNotOptimize(sigma(FamilyId::epd, EstimatorKind::ml, {lam, 0.0, 1.0}, KnownMask::none(FamilyId::epd)));
    }
}
BENCHMARK(BM_SigmaCold);

void BM_SigmaWarm(benchmark::State& state) {
    const ParamVector theta{1.25, 0.0, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(sigma(FamilyId::epd, EstimatorKind::ml, theta, KnownMask::none(FamilyId::epd)));
}
BENCHMARK(BM_SigmaWarm);

void BM_PowerCurve(benchmark::State& state) {
    const power::LocalAlternative alt{power::Case::epd_vs_apd, EstimatorKind::mm, {1.5, 0.0, 1.0}};
    std::vector<double> d1(41), d2(41);
    for (int i = 0; i <= 40; ++i) {
        d1[i] = 0.1 * i;
        d2[i] = 0.5 * i;
    }
    for (auto _ : state) benchmark::DoNotOptimize(power::power_curve(alt, d1, d2));
}
BENCHMARK(BM_PowerCurve);

void BM_MonteCarloPvalue(benchmark::State& state) {
    const ParamVector theta{0.0, 1.0};
    const auto mask = KnownMask::none(FamilyId::logistic);
    const McOptions opts{static_cast<std::size_t>(state.range(0)), 5, 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_pvalue(FamilyId::logistic, EstimatorKind::ml, mask, theta, 200, 1.0, opts));
}
BENCHMARK(BM_MonteCarloPvalue)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
