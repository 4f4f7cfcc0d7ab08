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

#include "covsel/linalg.hpp"

#include <cmath>
#include <string>

#include "covsel/errors.hpp"

namespace covsel {

bool try_spd_factor(const Matrix& a, Eigen::LLT<Matrix>& llt, double& log_det) {
    llt.compute(a);
    if (llt.info() != Eigen::Success) return false;
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double d = l(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        acc += std::log(d);
    }
    log_det = 2.0 * acc;
    return true;
}

SpdFactor::SpdFactor(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw NumericalError("SPD factorization needs a non-empty square matrix");
    }
    if (!try_spd_factor(a, llt_, log_det_)) {
        throw NumericalError("matrix is not positive definite (non-positive Cholesky pivot)");
    }
}

Matrix SpdFactor::inverse() const {
    const auto p = llt_.matrixLLT().rows();
    Matrix inv = llt_.solve(Matrix::Identity(p, p));
    return symmetrize(inv);
}

bool is_symmetric(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_positive_definite(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0 || !a.allFinite()) return false;
    Eigen::LLT<Matrix> llt;
    double ld = 0.0;
    return try_spd_factor(a, llt, ld);
}

Vector symmetric_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Matrix inverse_sqrt_spd(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw NumericalError("inverse square root requires a positive-definite matrix");
    }
    const Vector inv_sqrt = es.eigenvalues().array().rsqrt();
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace covsel
