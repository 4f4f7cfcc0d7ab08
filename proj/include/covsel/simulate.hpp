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
#include <map>
#include <string>
#include <vector>

#include "covsel/fit.hpp"
#include "covsel/population.hpp"
#include "covsel/select.hpp"

namespace covsel {

enum class LawKind { gaussian, student_t, scale_mixture };

[[nodiscard]] std::string to_string(LawKind k);

struct DataLaw {
    LawKind kind = LawKind::gaussian;
    Vector mean;
    Matrix cov;
    double dof = 8.0;  // student_t, must exceed 4
    // scale_mixture: variance level low w.p. mix_weight, high otherwise,
    // rescaled so the mixing variable has unit mean.
    double mix_weight = 0.5;
    double mix_low = 0.5;
    double mix_high = 1.5;

    [[nodiscard]] int p() const { return static_cast<int>(cov.rows()); }
    [[nodiscard]] PopulationTarget target() const { return {mean, cov}; }
};

// n x p draws with mean `mean` and covariance exactly `cov`. Rows are drawn
// sequentially, so a shorter sample is a prefix of a longer one.
[[nodiscard]] Matrix generate_data(const DataLaw& law, long n, std::uint64_t seed);

struct MonteCarloPlan {
    std::vector<long> n_grid;
    int replications = 1;
    std::uint64_t seed = 0;
    DataLaw law;
    CandidateFamily family;
    std::vector<PenaltySystem> systems;
};

struct McCell {
    std::string system;
    long n = 0;
    std::map<int, double> order_frequency;
    std::vector<double> model_frequency;
    double mean_margin = 0.0;
    double median_margin = 0.0;
    double decisive_fraction = 0.0;
    std::vector<int> selected_orders;  // per replication
};

struct McReport {
    std::vector<McCell> cells;  // system-major, then n in grid order
    std::vector<std::vector<std::uint64_t>> replication_seeds;  // [replication][n index]
    double decisive_threshold_per_n = 1e-6;

    [[nodiscard]] const McCell& cell(const std::string& system, long n) const;
};

[[nodiscard]] std::uint64_t cell_seed(std::uint64_t plan_seed, int replication, long n);

// Replication x n cells run as independent OpenMP work units.
[[nodiscard]] McReport run_monte_carlo(const MonteCarloPlan& plan, const FitOptions& opts);
// Serial reference; produces identical reports.
[[nodiscard]] McReport run_monte_carlo_reference(const MonteCarloPlan& plan, const FitOptions& opts);

struct TracePoint {
    long n = 0;
    std::vector<double> values;
    double mean = 0.0;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
};

struct OverfitGainTrace {
    int model = 0;
    std::vector<TracePoint> points;            // values are T_k,n - U_n
    std::vector<double> median_over_log_log_n;
    std::vector<double> median_over_log_n;
    double slope_vs_log_n = 0.0;               // of median / log log n against log n
    bool benchmark_exact = false;              // G* is a known singleton
    std::vector<std::string> notes;
};

struct SuboptimalLossTrace {
    int model = 0;
    std::vector<TracePoint> points;            // values are (T_k,n - U_n) / n
    double population_limit = 0.0;             // -(V* - V_k)
    bool benchmark_exact = false;
    std::vector<std::string> notes;
};

// Each replication follows one sample path; sample size n uses its first n rows.
[[nodiscard]] OverfitGainTrace overfit_gain_trace(const CandidateFamily& family, const DataLaw& law, int k_overfit,
                                                  const std::vector<long>& n_grid, int replications,
                                                  std::uint64_t seed, const FitOptions& opts,
                                                  const PopulationOptions& pop_opts = {});

[[nodiscard]] SuboptimalLossTrace suboptimal_loss_trace(const CandidateFamily& family, const DataLaw& law, int k_sub,
                                                        const std::vector<long>& n_grid, int replications,
                                                        std::uint64_t seed, const FitOptions& opts,
                                                        const PopulationOptions& pop_opts = {});

// Unique sigma_+ > 1 with log s + 1/s equal to its value at sigma_minus.
[[nodiscard]] double sigma_plus(double sigma_minus);

struct PathologyCell {
    long n = 0;
    std::map<std::string, std::vector<double>> selection_frequency;  // per system, per model
    std::vector<double> contrasts;  // T_1,n - T_2,n per replication
    double contrast_sd_over_sqrt_n = 0.0;
    double contrast_mean_over_sqrt_n = 0.0;
    double max_identity_error = 0.0;  // relative to max(1, |contrast|)
};

struct PathologyReport {
    double sigma_minus = 0.0;
    double sigma_plus = 0.0;
    double predicted_sd_over_sqrt_n = 0.0;
    std::vector<PathologyCell> cells;
};

[[nodiscard]] PathologyReport pathology_two_point(double sigma_minus, const std::vector<long>& n_grid, int replications,
                                                  std::uint64_t seed, const std::vector<PenaltySystem>& systems);

struct FlatMarginClass {
    ModelSpec spec;
    std::vector<double> t_values;      // sorted, includes 0
    std::vector<double> level_residuals;
    Matrix tangent;
    Matrix corrector;
    Matrix bump;
};

// Samples gamma(t) = zeta(t) + t^4 H where zeta is a level curve of Q through
// sigma_star. The class is emitted as an explicit set.
[[nodiscard]] FlatMarginClass build_flat_margin_class(const PopulationTarget& target, const Matrix& sigma_star,
                                                      const std::vector<double>& t_grid, int curve_points,
                                                      std::uint64_t seed = 0);

// Exact two-sided Clopper-Pearson interval for x successes in n trials.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};
[[nodiscard]] Interval clopper_pearson(int successes, int trials, double confidence);

}  // namespace covsel
