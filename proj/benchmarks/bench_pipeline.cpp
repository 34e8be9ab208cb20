#include <benchmark/benchmark.h>

#include "polyspline/assembly.hpp"
#include "polyspline/experiments.hpp"
#include "polyspline/franke.hpp"
#include "polyspline/generators.hpp"
#include "polyspline/preprocess.hpp"

using namespace polyspline;

namespace {

DiscretizationOptions options(BasisMode mode)
{
    DiscretizationOptions o;
    o.mode = mode;
    return o;
}

void BM_BuildBasis(benchmark::State& state, BasisMode mode)
{
    const PolyMesh mesh = regular_grid(int(state.range(0)), int(state.range(0)));
    for (auto _ : state) {
        Discretization disc(mesh, options(mode));
        benchmark::DoNotOptimize(disc.num_dofs());
    }
}

void BM_Assemble(benchmark::State& state, BasisMode mode)
{
    const Discretization disc(regular_grid(int(state.range(0)), int(state.range(0))), options(mode));
    for (auto _ : state) {
        auto K = assemble_stiffness(disc);
        benchmark::DoNotOptimize(K.nonZeros());
    }
    state.counters["N"] = disc.num_dofs();
}

void BM_Pipeline(benchmark::State& state, BasisMode mode)
{
    const Discretization disc(regular_grid(int(state.range(0)), int(state.range(0))), options(mode));
    const auto problem = franke_poisson_problem();
    for (auto _ : state) {
        auto r = run_pipeline(disc, problem);
        benchmark::DoNotOptimize(r.norms.l2);
    }
    state.counters["N"] = disc.num_dofs();
}

void BM_HybridBasis(benchmark::State& state)
{
    PolyMesh mesh = hybrid_cross_mesh(5);
    for (int l = 0; l < state.range(0); ++l)
        mesh = uniform_refine(mesh);
    for (auto _ : state) {
        Discretization disc(mesh, options(BasisMode::PolySpline));
        benchmark::DoNotOptimize(disc.num_dofs());
    }
}

} // namespace

BENCHMARK_CAPTURE(BM_BuildBasis, q1, BasisMode::Q1)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildBasis, q2, BasisMode::Q2)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildBasis, spline, BasisMode::PolySpline)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, q2, BasisMode::Q2)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, spline, BasisMode::PolySpline)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Pipeline, q1, BasisMode::Q1)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Pipeline, spline, BasisMode::PolySpline)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HybridBasis)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
