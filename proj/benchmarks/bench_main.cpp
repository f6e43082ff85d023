#include <cmath>

#include <benchmark/benchmark.h>

#include "asymlab/barrier_profiles.hpp"
#include "asymlab/elliptic_solver.hpp"
#include "asymlab/field_synthesis.hpp"
#include "asymlab/operator_family.hpp"
#include "asymlab/quadrature.hpp"

using namespace asymlab;

namespace {

void BM_GaussKronrod(benchmark::State& state) {
    for (auto _ : state) {
        auto r = gauss_kronrod([](double x) { return std::exp(-x) * std::cos(5.0 * x); }, 0.0, 10.0, 1e-12);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_GaussKronrod);

void BM_InvertGap(benchmark::State& state) {
    const OperatorSpec mg = make_minimal_graph();
    double gap = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(invert_a_gap(mg, gap, 1e-13));
        gap = gap < 1e-14 ? 1e-3 : gap * 0.5;
    }
}
BENCHMARK(BM_InvertGap);

void BM_Classify(benchmark::State& state) {
    const OperatorSpec mg = make_minimal_graph();
    for (auto _ : state) benchmark::DoNotOptimize(classify(mg, 1e-10).divergence_exponent);
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

void BM_ScherkProfile(benchmark::State& state) {
    const OperatorSpec mg = make_minimal_graph();
    for (auto _ : state) benchmark::DoNotOptimize(scherk_profile(mg, 0.0, 1.0, 2, 1e-10).size());
}
BENCHMARK(BM_ScherkProfile)->Unit(benchmark::kMillisecond);

void BM_DivergenceResidual(benchmark::State& state) {
    const OperatorSpec p2 = make_p_laplacian(2.0);
    const Model model{2, 1.0};
    const IdealPoint xi(Vec::Unit(2, 0));
    const Horosphere h(xi, Point::origin(model));
    const ScalarField field(singular_profile(p2, 2, {-12.0, 4.0}, 1e-10), distance::Horospherical{h}, model);
    Vec x(2);
    x << 0.2, 0.3;
    const Point pt(x, model);
    for (auto _ : state) benchmark::DoNotOptimize(divergence_residual(field, p2, pt, 1e-3));
}
BENCHMARK(BM_DivergenceResidual);

void BM_SolveDisk(benchmark::State& state) {
    const OperatorSpec mg = make_minimal_graph();
    DiskGrid grid;
    grid.r_trunc = 3.0;
    grid.nr = static_cast<int>(state.range(0));
    grid.ntheta = 2 * static_cast<int>(state.range(0));
    const auto data = [](double th) { return std::cos(th) > 0.5 ? 1.0 : 0.0; };
    for (auto _ : state) benchmark::DoNotOptimize(solve_disk(mg, grid, data).residual_norm);
}
BENCHMARK(BM_SolveDisk)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
