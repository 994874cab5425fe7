#include "nlcp/nlcp.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace nlcp;

std::vector<PredictionRecord> calibration_set(std::size_t n) {
    SyntheticConfig cfg;
    cfg.n = n;
    cfg.clean_trained = true;
    cfg.seed = 3;
    return generate(cfg);
}

void BM_ConvolveSame(benchmark::State& state) {
    const auto L = static_cast<std::size_t>(state.range(0));
    const NoiseKernel k = discretize_kernel(0.2, 0.01);
    std::vector<double> x(L), out(L);
    for (std::size_t i = 0; i < L; ++i) x[i] = std::sin(0.01 * static_cast<double>(i)) + 1.0;
    for (auto _ : state) {
        convolve_same(x, k, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(L * k.weights.size()));
}
BENCHMARK(BM_ConvolveSame)->Arg(256)->Arg(1024);

void BM_EstimateMNoisy(benchmark::State& state) {
    const auto cal = calibration_set(static_cast<std::size_t>(state.range(0)));
    std::vector<double> labels;
    for (const auto& r : cal) labels.push_back(*r.label_noisy);
    const auto binned = bin_noisy_labels(cal, build_grid(labels, 0.2, 0.01));
    for (auto _ : state) {
        auto m = estimate_m_noisy(1.8, cal, binned);
        benchmark::DoNotOptimize(m.values().data());
    }
}
BENCHMARK(BM_EstimateMNoisy)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SolveRow(benchmark::State& state) {
    const auto solver = state.range(0) == 0 ? DeconvSolver::ProjectedGradient : DeconvSolver::Accelerated;
    const auto cal = calibration_set(2000);
    std::vector<double> labels;
    for (const auto& r : cal) labels.push_back(*r.label_noisy);
    const BinGrid grid = build_grid(labels, 0.2, 0.01);
    const EmpiricalMatrix m = estimate_m_noisy(1.8, cal, grid);
    const NoiseKernel k = discretize_kernel(0.2, 0.01);
    DeconvConfig cfg;
    cfg.solver = solver;
    const double lipschitz = lipschitz_bound(k, m.col_mask(), cfg);
    const std::size_t row = m.size() / 2;
    for (auto _ : state) {
        auto sol = solve_row(RowProblem{m.row(row), m.col_mask(), {}, lipschitz}, k, cfg, 0.01);
        benchmark::DoNotOptimize(sol.values.data());
        state.counters["iterations"] = sol.report.iterations;
    }
}
BENCHMARK(BM_SolveRow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CalibrateRobust(benchmark::State& state) {
    const auto cal = calibration_set(2000);
    RobustConfig rc;
    rc.sigma = 0.2;
    rc.delta_y = 0.02;
    for (auto _ : state) {
        auto res = calibrate_robust(cal, rc);
        benchmark::DoNotOptimize(res.result.q_hat);
    }
}
BENCHMARK(BM_CalibrateRobust)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();
