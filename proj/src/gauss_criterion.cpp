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

#include "covsel/gauss_criterion.hpp"

#include "covsel/errors.hpp"

namespace covsel {

SampleMoments compute_moments(const Matrix& data) {
    if (data.rows() == 0 || data.cols() == 0) throw ValidationError("cannot compute moments of empty data");
    SampleMoments m;
    m.n = data.rows();
    m.mean = data.colwise().mean().transpose();
    const Matrix centered = data.rowwise() - m.mean.transpose();
    m.cov = symmetrize(centered.transpose() * centered / static_cast<double>(m.n));
    return m;
}

SampleMoments as_moments(const PopulationTarget& target) {
    return SampleMoments{1, target.mean, target.cov};
}

namespace {
void check_shape(const Matrix& sigma, int p) {
    if (sigma.rows() != p || sigma.cols() != p) throw ValidationError("covariance has the wrong dimension");
}
}  // namespace

double full_loglik(const Vector& mu, const Matrix& sigma, const SampleMoments& moments) {
    check_shape(sigma, moments.p());
    const SpdFactor f(sigma);
    const Vector diff = moments.mean - mu;
    const double quad = diff.dot(f.solve(diff));
    const double tr = f.solve(moments.cov).trace();
    return -0.5 * static_cast<double>(moments.n) * (f.log_det() + tr + quad);
}

double profiled_loglik(const Matrix& sigma, const SampleMoments& moments) {
    check_shape(sigma, moments.p());
    const SpdFactor f(sigma);
    return -0.5 * static_cast<double>(moments.n) * (f.log_det() + f.solve(moments.cov).trace());
}

double population_q(const Matrix& sigma, const PopulationTarget& target) {
    check_shape(sigma, target.p());
    const SpdFactor f(sigma);
    return -0.5 * (f.log_det() + f.solve(target.cov).trace());
}

double population_gamma(const Vector& mu, const Matrix& sigma, const PopulationTarget& target) {
    check_shape(sigma, target.p());
    const SpdFactor f(sigma);
    const Vector diff = mu - target.mean;
    return -0.5 * (f.log_det() + f.solve(target.cov).trace() + diff.dot(f.solve(diff)));
}

double gaussian_kl(const Matrix& sigma0, const Matrix& sigma) {
    const SpdFactor f(sigma);
    const SpdFactor f0(sigma0);
    const double p = static_cast<double>(sigma.rows());
    return 0.5 * (f.solve(sigma0).trace() - p + f.log_det() - f0.log_det());
}

Vector ProfiledGradient::flat() const {
    Vector v(loadings.size() + uniqueness.size());
    v << loadings, uniqueness;
    return v;
}

ProfiledGradient grad_profiled(const FactorPoint& point, const ModelSpec& spec, const SampleMoments& moments) {
    if (spec.kind != ModelKind::factor_class) throw ValidationError("gradient needs a factor_class model");
    if (auto v = point_violations(point, spec); !v.empty()) throw ValidationError(v.front());
    const Matrix sigma = assemble_sigma(point.loadings, point.uniqueness);
    const SpdFactor f(sigma);
    const Matrix inv = f.inverse();
    const Matrix kernel = symmetrize(inv - inv * moments.cov * inv);
    const double n = static_cast<double>(moments.n);
    const Matrix lam_grad = -n * kernel * point.loadings;

    ProfiledGradient g;
    g.loadings = Vector(static_cast<Eigen::Index>(spec.pattern.size()));
    Eigen::Index i = 0;
    for (const auto& [r, c] : spec.pattern.entries) g.loadings(i++) = lam_grad(r, c);
    if (spec.error_type == ErrorType::diagonal) {
        g.uniqueness = -0.5 * n * kernel.diagonal();
    } else {
        g.uniqueness = Vector::Constant(1, -0.5 * n * kernel.trace());
    }
    return g;
}

Matrix dq_matrix(const Matrix& sigma, const PopulationTarget& target) {
    const SpdFactor f(sigma);
    const Matrix inv = f.inverse();
    return symmetrize(-0.5 * (inv - inv * target.cov * inv));
}

double d2q_form(const Matrix& h, const PopulationTarget& target) {
    if (!is_symmetric(h)) throw ValidationError("direction must be symmetric");
    const SpdFactor f(target.cov);
    const Matrix a = f.solve(h);
    return -0.5 * (a * a).trace();
}

}  // namespace covsel
