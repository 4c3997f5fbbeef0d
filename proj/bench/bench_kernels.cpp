/// @file bench_kernels.cpp
/// @brief Serial reference versus OpenMP kernels at several grid sizes.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "carroll/kernels.hpp"
#include "carroll/solver.hpp"

using namespace carroll;
using kernels::Exec;

namespace {

struct Field {
    std::vector<double> s, b, ds, db;
    kernels::Workspace ws;
    explicit Field(long n) : s(n + 2), b(n + 2), ds(n), db(n) {
        for (long i = 0; i < n + 2; ++i) {
            const double x = (i - 0.5) / n;
            s[i] = 2.0 + 0.5 * std::sin(2 * M_PI * x);
            b[i] = 0.5 * std::cos(2 * M_PI * x);
        }
    }
};

template <Exec E>
void BM_rhs_conservative(benchmark::State& st) {
    const long n = st.range(0);
    Field f(n);
    for (auto _ : st) {
        kernels::rhs_conservative(f.s, f.b, 1.0 / n, 0.01, kernels::Differencing::flux_form, f.ds, f.db, f.ws, E);
        benchmark::DoNotOptimize(f.ds.data());
    }
    st.SetItemsProcessed(st.iterations() * n);
}

template <Exec E>
void BM_rhs_modified(benchmark::State& st) {
    const long n = st.range(0);
    Field f(n);
    for (auto _ : st) {
        kernels::rhs_modified(f.s, f.b, 1.0 / n, 0.01, 1.0, f.ds, f.db, E);
        benchmark::DoNotOptimize(f.ds.data());
    }
    st.SetItemsProcessed(st.iterations() * n);
}

template <Exec E>
void BM_gradient_sum(benchmark::State& st) {
    const long n = st.range(0);
    Field f(n);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::central_gradient_sq_sum(f.s, f.b, E));
    st.SetItemsProcessed(st.iterations() * n);
}

template <Exec E>
void BM_step(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    FluidState s = FluidState::zeros(Grid1D::make(0.0, 1.0, n));
    for (int i = 0; i < n; ++i) {
        s.sigma[i] = 2.0 + 0.5 * std::sin(2 * M_PI * s.grid.x(i));
        s.beta[i] = 0.5 * std::cos(2 * M_PI * s.grid.x(i));
    }
    SolverConfig c;
    c.exec = E;
    for (auto _ : st) benchmark::DoNotOptimize(step_coupled(s, c).first.sigma.data());
    st.SetItemsProcessed(st.iterations() * n);
}

}  // namespace

#define CARROLL_BENCH(fn)                                                             \
    BENCHMARK_TEMPLATE(fn, Exec::serial)->RangeMultiplier(4)->Range(1 << 10, 1 << 18); \
    BENCHMARK_TEMPLATE(fn, Exec::parallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)

CARROLL_BENCH(BM_rhs_conservative);
CARROLL_BENCH(BM_rhs_modified);
CARROLL_BENCH(BM_gradient_sum);
CARROLL_BENCH(BM_step);

BENCHMARK_MAIN();
