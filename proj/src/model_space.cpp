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

#include "covsel/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "covsel/errors.hpp"
#include "covsel/rng.hpp"

namespace covsel {

std::string to_string(ErrorType t) {
    return t == ErrorType::diagonal ? "diag" : "sph";
}

SupportPattern SupportPattern::full(int p, int q) {
    SupportPattern s;
    s.p = p;
    s.q = q;
    s.entries.reserve(static_cast<std::size_t>(std::max(0, p * q)));
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < q; ++c) s.entries.emplace_back(r, c);
    return s;
}

SupportPattern SupportPattern::from_entries(int p, int q, std::vector<std::pair<int, int>> entries) {
    SupportPattern s;
    s.p = p;
    s.q = q;
    std::sort(entries.begin(), entries.end());
    s.entries = std::move(entries);
    return s;
}

bool SupportPattern::contains(int row, int col) const {
    return std::binary_search(entries.begin(), entries.end(), std::make_pair(row, col));
}

Matrix SupportPattern::mask() const {
    Matrix m = Matrix::Zero(p, q);
    for (const auto& [r, c] : entries) m(r, c) = 1.0;
    return m;
}

ModelSpec ModelSpec::factor(SupportPattern pattern, ErrorType error, ClassBounds bounds) {
    ModelSpec s;
    s.kind = ModelKind::factor_class;
    s.pattern = std::move(pattern);
    std::sort(s.pattern.entries.begin(), s.pattern.entries.end());
    s.error_type = error;
    s.bounds = bounds;
    s.nominal_order = s.pattern.q;
    return s;
}

ModelSpec ModelSpec::dense(int p, int q, ErrorType error, ClassBounds bounds) {
    return factor(SupportPattern::full(p, q), error, bounds);
}

ModelSpec ModelSpec::explicit_set(std::vector<Matrix> matrices, int nominal_order) {
    ModelSpec s;
    s.kind = ModelKind::explicit_set;
    s.matrices = std::move(matrices);
    s.nominal_order = nominal_order;
    return s;
}

int ModelSpec::p() const {
    if (kind == ModelKind::factor_class) return pattern.p;
    return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows());
}

int ModelSpec::order() const {
    return kind == ModelKind::factor_class ? pattern.q : nominal_order;
}

int ModelSpec::uniqueness_count() const {
    if (kind != ModelKind::factor_class) return 0;
    return error_type == ErrorType::diagonal ? pattern.p : 1;
}

std::vector<std::string> validate_spec(const ModelSpec& spec) {
    std::vector<std::string> out;
    if (spec.kind == ModelKind::factor_class) {
        const auto& pat = spec.pattern;
        if (pat.p <= 0) out.emplace_back("p must be a positive integer");
        if (pat.q < 0) out.emplace_back("q must be nonnegative");
        if (pat.q == 0 && !pat.entries.empty()) out.emplace_back("q = 0 requires an empty support pattern");
        std::set<std::pair<int, int>> seen;
        for (const auto& e : pat.entries) {
            if (e.first < 0 || e.first >= pat.p || e.second < 0 || e.second >= pat.q) {
                std::ostringstream os;
                os << "support entry (" << e.first << ", " << e.second << ") out of range";
                out.push_back(os.str());
            }
            if (!seen.insert(e).second) {
                std::ostringstream os;
                os << "duplicate support entry (" << e.first << ", " << e.second << ")";
                out.push_back(os.str());
            }
        }
        const auto& b = spec.bounds;
        if (!(b.psi_min > 0.0)) out.emplace_back("psi_min must be strictly positive");
        if (!(b.psi_max > b.psi_min)) out.emplace_back("psi_max must exceed psi_min");
        if (!std::isfinite(b.psi_max)) out.emplace_back("psi_max must be finite");
        if (!(b.loading_radius > 0.0) || !std::isfinite(b.loading_radius))
            out.emplace_back("loading radius M must be positive and finite");
    } else {
        if (spec.matrices.empty()) out.emplace_back("explicit_set needs at least one matrix");
        if (spec.nominal_order < 0) out.emplace_back("nominal_order must be nonnegative");
        const auto p = spec.matrices.empty() ? 0 : spec.matrices.front().rows();
        for (std::size_t i = 0; i < spec.matrices.size(); ++i) {
            const auto& m = spec.matrices[i];
            if (m.rows() != p || m.cols() != p) {
                out.push_back("explicit_set matrix " + std::to_string(i) + " has mismatched dimension");
                continue;
            }
            if (!is_symmetric(m)) out.push_back("explicit_set matrix " + std::to_string(i) + " is not symmetric");
            else if (!is_positive_definite(m))
                out.push_back("explicit_set matrix " + std::to_string(i) + " is not positive definite");
        }
    }
    return out;
}

std::vector<std::string> validate_family(const CandidateFamily& family) {
    std::vector<std::string> out;
    if (family.models.empty()) out.emplace_back("family must contain at least one model");
    if (family.complexities.size() != family.models.size())
        out.emplace_back("complexity list length does not match model list length");
    for (std::size_t k = 0; k < family.complexities.size(); ++k) {
        const double d = family.complexities[k];
        if (!(d > 0.0) || !std::isfinite(d))
            out.push_back("model " + std::to_string(k) + ": complexity must be positive and finite");
    }
    const int p0 = family.models.empty() ? 0 : family.models.front().p();
    for (std::size_t k = 0; k < family.models.size(); ++k) {
        for (auto& v : validate_spec(family.models[k])) out.push_back("model " + std::to_string(k) + ": " + v);
        if (family.models[k].p() != p0) {
            out.push_back("model " + std::to_string(k) + ": dimension mismatch (p = " +
                          std::to_string(family.models[k].p()) + ", expected " + std::to_string(p0) + ")");
        }
    }
    return out;
}

namespace {
[[noreturn]] void throw_joined(const std::vector<std::string>& v) {
    std::string msg;
    for (const auto& s : v) {
        if (!msg.empty()) msg += "; ";
        msg += s;
    }
    throw ValidationError(msg);
}
}  // namespace

void require_valid(const CandidateFamily& family) {
    if (auto v = validate_family(family); !v.empty()) throw_joined(v);
}

void require_valid(const ModelSpec& spec) {
    if (auto v = validate_spec(spec); !v.empty()) throw_joined(v);
}

std::vector<std::string> point_violations(const FactorPoint& point, const ModelSpec& spec) {
    std::vector<std::string> out;
    if (spec.kind != ModelKind::factor_class) {
        out.emplace_back("factor points only apply to factor_class models");
        return out;
    }
    const int p = spec.pattern.p, q = spec.pattern.q;
    if (point.loadings.rows() != p || point.loadings.cols() != q) {
        out.emplace_back("loading matrix has the wrong shape");
        return out;
    }
    if (point.uniqueness.size() != spec.uniqueness_count()) {
        out.emplace_back("uniqueness vector has the wrong length");
        return out;
    }
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < q; ++c)
            if (point.loadings(r, c) != 0.0 && !spec.pattern.contains(r, c))
                out.push_back("nonzero loading off the support at (" + std::to_string(r) + ", " + std::to_string(c) + ")");
    const double radius = spec.bounds.loading_radius;
    if (point.loadings.norm() > radius * (1.0 + 1e-12)) out.emplace_back("loading Frobenius norm exceeds M");
    for (Eigen::Index j = 0; j < point.uniqueness.size(); ++j) {
        const double v = point.uniqueness(j);
        if (!(v >= spec.bounds.psi_min && v <= spec.bounds.psi_max))
            out.push_back("uniqueness " + std::to_string(j) + " outside [psi_min, psi_max]");
    }
    return out;
}

Matrix assemble_sigma(const Matrix& loadings, const Vector& uniqueness) {
    Matrix sigma = loadings * loadings.transpose();
    if (uniqueness.size() == 1) sigma.diagonal().array() += uniqueness(0);
    else sigma.diagonal() += uniqueness;
    return sigma;
}

Matrix construct_sigma(const FactorPoint& point, const ModelSpec& spec) {
    require_valid(spec);
    if (auto v = point_violations(point, spec); !v.empty()) throw_joined(v);
    Matrix sigma = assemble_sigma(point.loadings, point.uniqueness);
    const Vector ev = symmetric_eigenvalues(sigma);
    const double lo = spec.bounds.psi_min;
    const double hi = spec.bounds.loading_radius * spec.bounds.loading_radius + spec.bounds.psi_max;
    const double slack = 1e-10 * hi;
    if (ev.minCoeff() < lo - slack || ev.maxCoeff() > hi + slack)
        throw NumericalError("constructed covariance violates the class eigenvalue bounds");
    return sigma;
}

int jacobian_rank_at(const FactorPoint& point, const ModelSpec& spec, double* tolerance_out) {
    const int p = spec.pattern.p;
    const int rows = p * (p + 1) / 2;
    const int cols = spec.parameter_count();
    if (cols == 0) return 0;
    Matrix jac = Matrix::Zero(rows, cols);
    auto vech_index = [](int i, int j) {
        if (i > j) std::swap(i, j);
        // column-major packing of the upper triangle
        return j * (j + 1) / 2 + i;
    };
    int col = 0;
    const Matrix& lam = point.loadings;
    for (const auto& [a, h] : spec.pattern.entries) {
        // d Sigma_ij / d lambda_ah = delta_ia lambda_jh + lambda_ih delta_ja
        for (int j = 0; j < p; ++j) {
            const double v = (j == a) ? 2.0 * lam(a, h) : lam(j, h);
            jac(vech_index(a, j), col) += v;
        }
        ++col;
    }
    if (spec.error_type == ErrorType::diagonal) {
        for (int j = 0; j < p; ++j) jac(vech_index(j, j), col++) = 1.0;
    } else {
        for (int j = 0; j < p; ++j) jac(vech_index(j, j), col) = 1.0;
        ++col;
    }
    Eigen::JacobiSVD<Matrix> svd(jac);
    const Vector sv = svd.singularValues();
    const double tol = sv.size() > 0 ? sv(0) * rows * 1e-10 : 0.0;
    if (tolerance_out) *tolerance_out = tol;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return rank;
}

namespace {

FactorPoint random_interior_point(const ModelSpec& spec, Rng& rng) {
    const int p = spec.pattern.p, q = spec.pattern.q;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> frac(0.2, 0.8);
    FactorPoint pt;
    pt.loadings = Matrix::Zero(p, q);
    for (const auto& [r, c] : spec.pattern.entries) pt.loadings(r, c) = unit(rng);
    const double norm = pt.loadings.norm();
    if (norm > 0.0) pt.loadings *= frac(rng) * spec.bounds.loading_radius / norm;
    const double lo = spec.bounds.psi_min, hi = spec.bounds.psi_max, w = hi - lo;
    std::uniform_real_distribution<double> psi(lo + 0.1 * w, hi - 0.1 * w);
    pt.uniqueness = Vector(spec.uniqueness_count());
    for (Eigen::Index j = 0; j < pt.uniqueness.size(); ++j) pt.uniqueness(j) = psi(rng);
    return pt;
}

}  // namespace

double complexity(const ModelSpec& spec, ComplexityScheme scheme, std::uint64_t seed) {
    if (spec.kind != ModelKind::factor_class)
        throw ValidationError("complexity schemes apply to factor_class models; use a fixed complexity");
    require_valid(spec);
    const int p = spec.pattern.p, q = spec.pattern.q;
    const double uniq = spec.uniqueness_count();
    switch (scheme) {
        case ComplexityScheme::dense_gauge:
            if (!spec.pattern.is_full())
                throw ValidationError("dense_gauge complexity requires the full support pattern");
            return p * q - q * (q - 1) / 2.0 + uniq;
        case ComplexityScheme::raw_support:
            return static_cast<double>(spec.pattern.size()) + uniq;
        case ComplexityScheme::jacobian_rank: {
            std::map<int, int> counts;
            Rng rng(derive_seed(seed, {0x4a4143ULL}));
            for (int attempt = 0; attempt < 5; ++attempt) {
                const FactorPoint pt = random_interior_point(spec, rng);
                if (!point_violations(pt, spec).empty())
                    throw NumericalError("could not draw an interior admissible point");
                ++counts[jacobian_rank_at(pt, spec)];
                // a single draw already at the structural maximum settles it
                if (counts.size() == 1 && counts.begin()->first ==
                        std::min(spec.parameter_count(), p * (p + 1) / 2))
                    break;
            }
            int best = 0, best_count = -1;
            for (const auto& [rank, cnt] : counts)
                if (cnt >= best_count) best = rank, best_count = cnt;
            return static_cast<double>(best);
        }
    }
    throw ValidationError("unknown complexity scheme");
}

std::vector<double> dense_gap_table(int p, int q_max, ErrorType error) {
    if (p <= 0) throw ValidationError("p must be positive");
    if (q_max < 0 || q_max >= p) throw ValidationError("dense gap table needs 0 <= q_max <= p - 1");
    const double c = error == ErrorType::diagonal ? p : 1.0;
    auto weight = [&](int q) { return p * q - q * (q - 1) / 2.0 + c; };
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(q_max));
    for (int q = 0; q < q_max; ++q) gaps.push_back(weight(q + 1) - weight(q));
    return gaps;
}

FactorPoint redundant_representation(const FactorPoint& point, int j, double b, double theta,
                                     const ClassBounds* bounds) {
    const auto p = point.loadings.rows();
    if (point.uniqueness.size() != p) throw ValidationError("redundant representation needs a diagonal uniqueness");
    if (j < 0 || j >= p) throw ValidationError("coordinate index out of range");
    if (b == 0.0) throw ValidationError("b must be nonzero");
    const double limit = point.uniqueness(j) / (b * b);
    if (!(theta > 0.0 && theta < limit)) throw ValidationError("theta must lie in (0, psi_j / b^2)");
    FactorPoint out;
    out.loadings = Matrix::Zero(p, point.loadings.cols() + 1);
    out.loadings.leftCols(point.loadings.cols()) = point.loadings;
    out.loadings(j, point.loadings.cols()) = std::sqrt(theta) * b;
    out.uniqueness = point.uniqueness;
    out.uniqueness(j) -= theta * b * b;
    if (bounds) {
        if (out.uniqueness(j) < bounds->psi_min) throw ValidationError("reduced uniqueness falls below psi_min");
        if (out.loadings.norm() > bounds->loading_radius) throw ValidationError("extended loadings leave the ball");
    }
    return out;
}

}  // namespace covsel
