/*
 *  Copyright 2026 The covsel Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "covsel/fit.hpp"
#include "covsel/gauss_criterion.hpp"
#include "covsel/simulate.hpp"

using namespace covsel;

namespace {

SampleMoments moments(int p, long n) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(n, p);
    for (long t = 0; t < n; ++t) {
        const double f = g(rng);
        for (int j = 0; j < p; ++j) x(t, j) = 0.8 * f + g(rng);
    }
    return compute_moments(x);
}

MonteCarloPlan plan() {
    MonteCarloPlan pl;
    pl.n_grid = {250, 1000};
    pl.replications = 16;
    pl.seed = 5;
    Vector lam = Vector::Constant(4, 0.8);
    pl.law.mean = Vector::Zero(4);
    pl.law.cov = lam * lam.transpose() + Matrix::Identity(4, 4);
    for (int q = 0; q <= 2; ++q) {
        pl.family.models.push_back(ModelSpec::dense(4, q, ErrorType::diagonal, {}));
        pl.family.complexities.push_back(complexity(pl.family.models.back(), ComplexityScheme::dense_gauge));
    }
    pl.systems = {PenaltySystem::named(PenaltyKind::bic)};
    return pl;
}

void BM_fit_class(benchmark::State& st) {
    const auto m = moments(8, 2000);
    const auto spec = ModelSpec::dense(8, 3, ErrorType::diagonal, {});
    FitOptions o;
    o.starts = 16;
    for (auto _ : st) benchmark::DoNotOptimize(fit_class(spec, m, o));
}

void BM_fit_class_reference(benchmark::State& st) {
    const auto m = moments(8, 2000);
    const auto spec = ModelSpec::dense(8, 3, ErrorType::diagonal, {});
    FitOptions o;
    o.starts = 16;
    for (auto _ : st) benchmark::DoNotOptimize(fit_class_reference(spec, m, o));
}

void BM_brute_force(benchmark::State& st) {
    const auto m = moments(2, 500);
    const auto spec = ModelSpec::dense(2, 1, ErrorType::diagonal, {});
    for (auto _ : st) benchmark::DoNotOptimize(brute_force_fit(spec, m, 24));
}

void BM_brute_force_reference(benchmark::State& st) {
    const auto m = moments(2, 500);
    const auto spec = ModelSpec::dense(2, 1, ErrorType::diagonal, {});
    for (auto _ : st) benchmark::DoNotOptimize(brute_force_fit_reference(spec, m, 24));
}

void BM_monte_carlo(benchmark::State& st) {
    const auto pl = plan();
    FitOptions o;
    for (auto _ : st) benchmark::DoNotOptimize(run_monte_carlo(pl, o));
}

void BM_monte_carlo_reference(benchmark::State& st) {
    const auto pl = plan();
    FitOptions o;
    for (auto _ : st) benchmark::DoNotOptimize(run_monte_carlo_reference(pl, o));
}

}  // namespace

BENCHMARK(BM_fit_class)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fit_class_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_brute_force)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_brute_force_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
