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
#include <utility>
#include <vector>

#include "covsel/linalg.hpp"

namespace covsel {

enum class ErrorType { diagonal, spherical };

[[nodiscard]] std::string to_string(ErrorType t);

// Positions (row, column), 0-based, where loadings may be nonzero. Entries are
// kept sorted row-major so that serialization and parameter order are canonical.
struct SupportPattern {
    int p = 0;
    int q = 0;
    std::vector<std::pair<int, int>> entries;

    static SupportPattern full(int p, int q);
    static SupportPattern from_entries(int p, int q, std::vector<std::pair<int, int>> entries);

    [[nodiscard]] bool is_full() const { return entries.size() == static_cast<std::size_t>(p) * q; }
    [[nodiscard]] bool contains(int row, int col) const;
    [[nodiscard]] std::size_t size() const { return entries.size(); }
    [[nodiscard]] Matrix mask() const;
};

struct ClassBounds {
    double psi_min = 0.25;
    double psi_max = 4.0;
    double loading_radius = 3.0;
};

enum class ModelKind { factor_class, explicit_set };

struct ModelSpec {
    ModelKind kind = ModelKind::factor_class;

    // factor_class
    SupportPattern pattern;
    ErrorType error_type = ErrorType::diagonal;
    ClassBounds bounds;

    // explicit_set
    std::vector<Matrix> matrices;
    int nominal_order = 0;

    static ModelSpec factor(SupportPattern pattern, ErrorType error, ClassBounds bounds);
    static ModelSpec dense(int p, int q, ErrorType error, ClassBounds bounds);
    static ModelSpec explicit_set(std::vector<Matrix> matrices, int nominal_order);

    [[nodiscard]] int p() const;
    [[nodiscard]] int order() const;
    [[nodiscard]] int uniqueness_count() const;
    [[nodiscard]] int parameter_count() const { return static_cast<int>(pattern.size()) + uniqueness_count(); }
};

struct CandidateFamily {
    std::vector<ModelSpec> models;
    std::vector<double> complexities;

    [[nodiscard]] std::size_t size() const { return models.size(); }
    [[nodiscard]] int p() const { return models.empty() ? 0 : models.front().p(); }
};

struct FactorPoint {
    Matrix loadings;     // p x q
    Vector uniqueness;   // p entries (diagonal) or 1 (spherical)
};

enum class ComplexityScheme { dense_gauge, raw_support, jacobian_rank };

// Returns every violated invariant as a readable message; empty means valid.
[[nodiscard]] std::vector<std::string> validate_spec(const ModelSpec& spec);
[[nodiscard]] std::vector<std::string> validate_family(const CandidateFamily& family);

// Throws ValidationError listing the violations, if any.
void require_valid(const CandidateFamily& family);
void require_valid(const ModelSpec& spec);

// Violations of the class constraints by a parameter point.
[[nodiscard]] std::vector<std::string> point_violations(const FactorPoint& point, const ModelSpec& spec);

// Sigma = Lambda Lambda^T + Psi for a class-admissible point. Rejects points
// off the support mask, outside the loading ball, or outside the uniqueness
// box, and verifies psi_min <= eig(Sigma) <= M^2 + psi_max.
[[nodiscard]] Matrix construct_sigma(const FactorPoint& point, const ModelSpec& spec);

// Unchecked assembly for inner loops.
[[nodiscard]] Matrix assemble_sigma(const Matrix& loadings, const Vector& uniqueness);

[[nodiscard]] double complexity(const ModelSpec& spec, ComplexityScheme scheme, std::uint64_t seed = 0);

// Consecutive dense-weight differences d_{q+1} - d_q for q = 0..q_max-1.
[[nodiscard]] std::vector<double> dense_gap_table(int p, int q_max, ErrorType error);

// Embeds a q-factor point into order q+1 with an extra column sqrt(theta) b e_j
// and psi_j reduced by theta b^2; the covariance is unchanged.
[[nodiscard]] FactorPoint redundant_representation(const FactorPoint& point, int j, double b, double theta,
                                                   const ClassBounds* bounds = nullptr);

// Rank of d vech(Lambda Lambda^T + Psi) / d(supported coords, psi) at a point.
[[nodiscard]] int jacobian_rank_at(const FactorPoint& point, const ModelSpec& spec, double* tolerance_out = nullptr);

}  // namespace covsel
