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

#include <string>
#include <vector>

#include "covsel/fit.hpp"
#include "covsel/penalties.hpp"

namespace covsel {

enum class ModelStatus { ok, not_converged, failed };

[[nodiscard]] std::string to_string(ModelStatus s);

struct SelectionReport {
    std::string penalty;
    long n = 0;
    std::vector<double> scores;
    std::vector<double> t_values;
    std::vector<double> penalties_applied;
    std::vector<ModelStatus> statuses;
    std::vector<int> excluded;
    bool reduced_set = false;
    int selected_index = -1;   // 0-based
    int selected_order = 0;
    double runner_up_margin = 0.0;  // +inf for a single eligible model

    [[nodiscard]] bool decisive(double threshold) const { return runner_up_margin > threshold; }
};

// W_k = T_k - a_k with selection of the smallest index among exact maximizers.
[[nodiscard]] SelectionReport select_from_fits(const CandidateFamily& family, const std::vector<FitResult>& fits,
                                               long n, const PenaltySystem& system);

// Same rule on raw numbers; `eligible` marks models whose fit produced a value.
[[nodiscard]] SelectionReport select_from_values(const CandidateFamily& family, const std::vector<double>& t_values,
                                                 const std::vector<ModelStatus>& statuses, long n,
                                                 const PenaltySystem& system);

[[nodiscard]] std::vector<FitResult> fit_family(const CandidateFamily& family, const SampleMoments& moments,
                                                const FitOptions& opts);

[[nodiscard]] SelectionReport select_model(const CandidateFamily& family, const SampleMoments& moments,
                                           const PenaltySystem& system, const FitOptions& opts);

}  // namespace covsel
