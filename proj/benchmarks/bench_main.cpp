#include "hilfer/controllability.hpp"
#include "hilfer/forward.hpp"
#include "hilfer/fracops.hpp"
#include "hilfer/mlf.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace hilfer;

namespace {

void BM_MlfEval(benchmark::State& state) {
    const MlfParams params{1.5, 0.75, 1e-12};
    const double z = -static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mlf_eval(params, z));
}
BENCHMARK(BM_MlfEval)->Arg(1)->Arg(30)->Arg(1000);

void BM_FracIntegral(benchmark::State& state) {
    const TimeGrid grid = TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
    const GridFunction f = GridFunction::sample(grid, [](double t) { return std::cos(t); });
    for (auto _ : state)
        benchmark::DoNotOptimize(frac_integral_left(0.5, f));
}
BENCHMARK(BM_FracIntegral)->Arg(128)->Arg(512);

void BM_SolveForward(benchmark::State& state) {
    const auto basis = SpectralBasis::dirichlet(std::numbers::pi, static_cast<std::size_t>(state.range(0)));
    const ForwardProblem p{FractionalOrder(1.5, 0.5), basis, TimeGrid::uniform(1.0, 256), Field::mode(basis, 0),
                           Field::mode(basis, 1), std::nullopt};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_forward(p));
}
BENCHMARK(BM_SolveForward)->Arg(8)->Arg(32);

void BM_ControlMap(benchmark::State& state) {
    const auto basis = SpectralBasis::dirichlet(std::numbers::pi, 8);
    const ControlTemplate t{FractionalOrder(1.5, 0.5), basis, 1.0,
                            Subdomain({{0.2 * std::numbers::pi, 0.6 * std::numbers::pi}}, std::numbers::pi),
                            static_cast<std::size_t>(state.range(0)), 8};
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_control_map(t));
}
BENCHMARK(BM_ControlMap)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
