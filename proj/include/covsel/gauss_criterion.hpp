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

#include "covsel/linalg.hpp"
#include "covsel/model_space.hpp"

namespace covsel {

// Sufficient statistics of the profiled criterion; covariance uses 1/n.
struct SampleMoments {
    long n = 0;
    Vector mean;
    Matrix cov;

    [[nodiscard]] int p() const { return static_cast<int>(mean.size()); }
};

struct PopulationTarget {
    Vector mean;
    Matrix cov;

    [[nodiscard]] int p() const { return static_cast<int>(cov.rows()); }
};

[[nodiscard]] SampleMoments compute_moments(const Matrix& data);

// Moments treating the population covariance as an n = 1 sample.
[[nodiscard]] SampleMoments as_moments(const PopulationTarget& target);

// Gaussian log-likelihood without the -np log(2 pi)/2 constant.
[[nodiscard]] double full_loglik(const Vector& mu, const Matrix& sigma, const SampleMoments& moments);

// -(n/2) { log det Sigma + tr(S_n Sigma^{-1}) }
[[nodiscard]] double profiled_loglik(const Matrix& sigma, const SampleMoments& moments);

// -(1/2) { log det Sigma + tr(Sigma_0 Sigma^{-1}) }
[[nodiscard]] double population_q(const Matrix& sigma, const PopulationTarget& target);

[[nodiscard]] double population_gamma(const Vector& mu, const Matrix& sigma, const PopulationTarget& target);

// KL( N(m, Sigma_0) || N(m, Sigma) ).
[[nodiscard]] double gaussian_kl(const Matrix& sigma0, const Matrix& sigma);

// Gradient of profiled_loglik in the masked parametrization: one entry per
// supported loading (row-major support order), then p or 1 uniqueness entries.
struct ProfiledGradient {
    Vector loadings;
    Vector uniqueness;

    [[nodiscard]] Vector flat() const;
};

[[nodiscard]] ProfiledGradient grad_profiled(const FactorPoint& point, const ModelSpec& spec,
                                             const SampleMoments& moments);

// Matrix-valued derivative of Q at Sigma: DQ(Sigma)[H] = <dq_matrix, H>_F.
[[nodiscard]] Matrix dq_matrix(const Matrix& sigma, const PopulationTarget& target);

// -(1/2) tr(Sigma_0^{-1} H Sigma_0^{-1} H)
[[nodiscard]] double d2q_form(const Matrix& h, const PopulationTarget& target);

}  // namespace covsel
