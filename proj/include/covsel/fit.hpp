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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covsel/gauss_criterion.hpp"
#include "covsel/model_space.hpp"

namespace covsel {

struct FitOptions {
    int starts = 8;
    int max_iters = 500;
    // Projected-gradient tolerance on the n-scaled criterion; unset means 1e-8 * n.
    std::optional<double> grad_tolerance;
    std::uint64_t seed = 0;
    int lbfgs_memory = 8;
    double armijo = 1e-4;
    int max_backtracks = 40;
    // OpenMP workers for the start loop; 0 keeps the runtime default.
    int threads = 0;

    [[nodiscard]] double tolerance_for(long n) const {
        return grad_tolerance.value_or(1e-8 * static_cast<double>(n));
    }
};

enum class FitStatus { converged, max_iters_reached, all_diverged };

[[nodiscard]] std::string to_string(FitStatus s);

struct StartOutcome {
    double t_value = 0.0;
    Matrix sigma;
    std::optional<FactorPoint> point;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool finite = true;
};

struct FitResult {
    double t_value = 0.0;
    std::optional<FactorPoint> best_point;
    Matrix sigma;
    int starts_converged = 0;
    double gradient_norm_at_solution = 0.0;
    FitStatus status = FitStatus::converged;
    int best_start = 0;
    std::vector<StartOutcome> start_outcomes;
};

// Maximizes the profiled likelihood over one class. `stream` identifies the
// model inside its family so per-start seeds are derived from
// (opts.seed, stream, start) and never depend on scheduling.
[[nodiscard]] FitResult fit_class(const ModelSpec& spec, const SampleMoments& moments, const FitOptions& opts,
                                  std::uint64_t stream = 0);

// Serial reference for fit_class; results are bit-identical.
[[nodiscard]] FitResult fit_class_reference(const ModelSpec& spec, const SampleMoments& moments,
                                            const FitOptions& opts, std::uint64_t stream = 0);

// Exhaustive grid over supported loadings in [-M, M] (projected onto the
// ball) crossed with uniqueness grids in [psi_min, psi_max].
[[nodiscard]] FitResult brute_force_fit(const ModelSpec& spec, const SampleMoments& moments, int grid_per_axis);
[[nodiscard]] FitResult brute_force_fit_reference(const ModelSpec& spec, const SampleMoments& moments,
                                                  int grid_per_axis);

// Euclidean projection onto the class: loadings masked and rescaled onto the
// Frobenius ball, uniqueness clipped to its box.
void project_point(FactorPoint& point, const ModelSpec& spec);

// Norm of P(x + g) - x for the n-scaled gradient g; zero at constrained optima.
[[nodiscard]] double projected_gradient_norm(const FactorPoint& point, const ModelSpec& spec,
                                             const SampleMoments& moments);

}  // namespace covsel
