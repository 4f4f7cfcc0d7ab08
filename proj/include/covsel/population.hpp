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

#include <optional>
#include <string>
#include <vector>

#include "covsel/fit.hpp"
#include "covsel/gauss_criterion.hpp"
#include "covsel/model_space.hpp"
#include "covsel/penalties.hpp"

namespace covsel {

struct PopulationOptions {
    FitOptions fit = default_fit();
    double epsilon_cluster = 1e-4;
    // unset: 1e-6 |V*| + 1e-9
    std::optional<double> epsilon_v;

    static FitOptions default_fit() {
        FitOptions f;
        f.max_iters = 2000;
        return f;
    }
};

// V_k and clustered representatives of the maximizer set G_k. These are
// optimizer representatives, not a certified description of G_k.
struct PopulationFit {
    double value = 0.0;
    std::vector<Matrix> maximizers;
    std::vector<std::optional<FactorPoint>> points;
    FitResult fit;
};

[[nodiscard]] PopulationFit population_fit(const ModelSpec& spec, const PopulationTarget& target,
                                           const PopulationOptions& opts = {}, std::uint64_t stream = 0);

struct PopulationSummary {
    std::vector<double> v_values;
    double v_star = 0.0;
    std::vector<int> k_star;
    int q_star = 0;
    std::vector<int> k_zero;
    std::vector<int> k_double_star;
    double d_star = 0.0;
    std::vector<std::vector<Matrix>> pseudo_true_reps;
    std::vector<std::vector<std::optional<FactorPoint>>> pseudo_true_points;
    double epsilon_v = 0.0;
    double epsilon_cluster = 0.0;

    [[nodiscard]] OrderStructure order_structure() const { return {k_star, q_star, k_zero, false}; }
    // Union of representatives over K*, de-duplicated at epsilon_cluster.
    [[nodiscard]] std::vector<Matrix> common_reps() const;
};

[[nodiscard]] PopulationSummary pseudo_true_summary(const CandidateFamily& family, const PopulationTarget& target,
                                                    const PopulationOptions& opts = {});

struct AssumptionDiagnostics {
    double m2_hausdorff = 0.0;
    double m2_threshold = 0.0;
    bool m2_pass = true;

    std::vector<int> models;                     // the K* indices examined for M3
    std::vector<std::optional<double>> m3_exponents;
    std::vector<std::optional<double>> m3_constants;
    std::vector<int> m3_probes_used;
    std::vector<std::string> m3_verdicts;        // pass / warn / insufficient
    double m3_exponent_low = 1.8;
    double m3_exponent_high = 2.2;
    std::vector<std::string> notes;
};

[[nodiscard]] double hausdorff_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

[[nodiscard]] AssumptionDiagnostics diagnose_assumptions(const CandidateFamily& family,
                                                         const PopulationSummary& summary,
                                                         const PopulationTarget& target, int probe_count = 40,
                                                         double eta = 0.1, const PopulationOptions& opts = {});

// c = 1 / (4 ||Sigma_0||_op^2): Q(Sigma) <= Q(Sigma_0) - c ||Sigma - Sigma_0||_F^2 locally.
[[nodiscard]] double margin_constant_correct_spec(const PopulationTarget& target);

// Least-squares slope and intercept of y on x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
[[nodiscard]] LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace covsel
