#include <benchmark/benchmark.h>

#include "qda/adaptation.hpp"
#include "qda/analytic.hpp"
#include "qda/model.hpp"
#include "qda/oracle.hpp"
#include "qda/pulse.hpp"
#include "runner.hpp"

namespace {

qda::DressedFrame frame_of(double j) {
    return qda::diagonalize(qda::SiteSystem(0.0, 0.0, j, 1.0, 1.0));
}

void bm_diagonalize(benchmark::State& state) {
    const qda::SiteSystem sys(0.5, -0.5, 1.3, 1.0, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(qda::diagonalize(sys));
}
BENCHMARK(bm_diagonalize);

void bm_closed_form_point(benchmark::State& state) {
    const qda::DressedFrame f = frame_of(0.5);
    const qda::ExpPulse pulse(1e-3, f.omega_minus + 0.37);
    for (auto _ : state)
        benchmark::DoNotOptimize(qda::closed_form_report(f, pulse));
}
BENCHMARK(bm_closed_form_point);

void bm_oracle_point_broad(benchmark::State& state) {
    const qda::DressedFrame f = frame_of(0.5);
    const qda::ExpPulse pulse(1.0, f.omega_minus + 0.37);
    const qda::Envelope env = qda::exp_envelope(pulse);
    for (auto _ : state)
        benchmark::DoNotOptimize(qda::oracle_report(f, env));
}
BENCHMARK(bm_oracle_point_broad);

void bm_oracle_point_narrow(benchmark::State& state) {
    const qda::DressedFrame f = frame_of(0.5);
    const qda::ExpPulse pulse(1e-3, f.omega_minus + 0.37);
    const qda::Envelope env = qda::exp_envelope(pulse);
    for (auto _ : state)
        benchmark::DoNotOptimize(qda::oracle_report(f, env));
}
BENCHMARK(bm_oracle_point_narrow);

void bm_analytic_sweep_2001(benchmark::State& state) {
    qda::cli::RunSpec spec;
    spec.points = 2001;
    spec.quantities = {"p_total", "w_abs", "rho_pm"};
    for (auto _ : state)
        benchmark::DoNotOptimize(qda::cli::run_sweep(spec));
}
BENCHMARK(bm_analytic_sweep_2001);

void bm_cascade(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(qda::cascade(0.045, 1.7, 1000));
}
BENCHMARK(bm_cascade);

} // namespace

BENCHMARK_MAIN();
