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

#include <Eigen/Dense>

namespace covsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Cholesky factorization of a symmetric positive-definite matrix. Construction
// throws NumericalError when a pivot is non-positive; nothing is clamped.
class SpdFactor {
public:
    explicit SpdFactor(const Matrix& a);

    [[nodiscard]] double log_det() const { return log_det_; }
    [[nodiscard]] Matrix inverse() const;
    [[nodiscard]] Matrix solve(const Matrix& b) const { return llt_.solve(b); }
    [[nodiscard]] Vector solve(const Vector& b) const { return llt_.solve(b); }
    [[nodiscard]] const Eigen::LLT<Matrix>& llt() const { return llt_; }

private:
    Eigen::LLT<Matrix> llt_;
    double log_det_ = 0.0;
};

// Non-throwing variant for inner loops: returns false when `a` is not PD.
bool try_spd_factor(const Matrix& a, Eigen::LLT<Matrix>& llt, double& log_det);

[[nodiscard]] bool is_symmetric(const Matrix& a, double tol = 1e-10);
[[nodiscard]] bool is_positive_definite(const Matrix& a);
[[nodiscard]] Vector symmetric_eigenvalues(const Matrix& a);

// Symmetric inverse square root, used for whitening directions.
[[nodiscard]] Matrix inverse_sqrt_spd(const Matrix& a);

[[nodiscard]] inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace covsel
