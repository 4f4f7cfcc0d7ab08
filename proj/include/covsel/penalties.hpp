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

#include "covsel/model_space.hpp"

namespace covsel {

enum class PenaltyKind { bic, caic, hbic, ssbic, hq, aic, separable, table };

// Sample-size multipliers b_n for separable systems a_{k,n} = b_n c_k.
enum class Multiplier { log_n_pow_alpha, constant, log_log_n, sqrt_n_log_n };

struct PenaltySystem {
    PenaltyKind kind = PenaltyKind::bic;

    // separable
    Multiplier multiplier = Multiplier::log_n_pow_alpha;
    double alpha = 1.0;            // exponent for log_n_pow_alpha
    double constant_value = 1.0;   // b_n for the constant multiplier
    std::vector<double> scores;    // c_k; empty means "use the family complexities"

    // table: values[k][i] is a_{k, n_grid[i]}
    std::vector<long> n_grid;
    std::vector<std::vector<double>> values;

    // Adds (1/2) p log n to every model (full-parameter unknown-mean BIC).
    int mean_penalty_p = 0;

    static PenaltySystem named(PenaltyKind kind);
    static PenaltySystem separable_system(Multiplier m, std::vector<double> scores = {}, double alpha = 1.0);
    static PenaltySystem table_system(std::vector<long> n_grid, std::vector<std::vector<double>> values);

    [[nodiscard]] std::string name() const;
};

[[nodiscard]] std::string to_string(PenaltyKind k);
[[nodiscard]] std::string to_string(Multiplier m);
[[nodiscard]] PenaltyKind penalty_kind_from_string(const std::string& s);
[[nodiscard]] Multiplier multiplier_from_string(const std::string& s);

// Closed-form a_n for complexity (or score) d; natural logarithms.
[[nodiscard]] double penalty_value(const PenaltySystem& system, double d, long n);

// a_{k,n} for every model of a family at sample size n.
[[nodiscard]] std::vector<double> family_penalties(const PenaltySystem& system, const std::vector<double>& complexities,
                                                   long n);

enum class Verdict { pass, fail, boundary };

[[nodiscard]] std::string to_string(Verdict v);

struct PenaltyClassification {
    Verdict p1 = Verdict::pass;
    Verdict p2 = Verdict::pass;
    Verdict p3 = Verdict::pass;
    bool admissible = true;
    std::vector<std::string> notes;
};

// The order structure the conditions refer to: optimal models, the
// pseudo-true order, and the minimal-order optimal models. Indices are 0-based.
struct OrderStructure {
    std::vector<int> k_star;
    int q_star = 0;
    std::vector<int> k_zero;
    bool hypothesized = false;
};

[[nodiscard]] PenaltyClassification classify_penalty(const PenaltySystem& system, const CandidateFamily& family,
                                                     const OrderStructure& order,
                                                     const std::vector<long>& n_probe_grid = {});

}  // namespace covsel
