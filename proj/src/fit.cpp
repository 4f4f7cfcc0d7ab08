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

#include "covsel/fit.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "covsel/errors.hpp"
#include "covsel/rng.hpp"

namespace covsel {

std::string to_string(FitStatus s) {
    switch (s) {
        case FitStatus::converged: return "converged";
        case FitStatus::max_iters_reached: return "max_iters_reached";
        case FitStatus::all_diverged: return "all_diverged";
    }
    return "unknown";
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Masked factor parametrization x = (supported loadings, uniqueness) and the
// per-observation criterion f(x) = -(1/2){log det Sigma + tr(S Sigma^{-1})}.
class ClassProblem {
public:
    ClassProblem(const ModelSpec& spec, const Matrix& s)
        : spec_(spec), s_(s), p_(spec.pattern.p), q_(spec.pattern.q),
          nl_(static_cast<Eigen::Index>(spec.pattern.size())), nu_(spec.uniqueness_count()) {}

    [[nodiscard]] Eigen::Index dim() const { return nl_ + nu_; }

    [[nodiscard]] FactorPoint unpack(const Vector& x) const {
        FactorPoint pt;
        pt.loadings = Matrix::Zero(p_, q_);
        Eigen::Index i = 0;
        for (const auto& [r, c] : spec_.pattern.entries) pt.loadings(r, c) = x(i++);
        pt.uniqueness = x.tail(nu_);
        return pt;
    }

    [[nodiscard]] Vector pack(const FactorPoint& pt) const {
        Vector x(dim());
        Eigen::Index i = 0;
        for (const auto& [r, c] : spec_.pattern.entries) x(i++) = pt.loadings(r, c);
        x.tail(nu_) = pt.uniqueness;
        return x;
    }

    void project(Vector& x) const {
        const double radius = spec_.bounds.loading_radius;
        const double norm = x.head(nl_).norm();
        if (norm > radius) x.head(nl_) *= radius / norm;
        x.tail(nu_) = x.tail(nu_).cwiseMax(spec_.bounds.psi_min).cwiseMin(spec_.bounds.psi_max);
    }

    bool evaluate(const Vector& x, double& f, Vector& g) {
        lam_.setZero(p_, q_);
        Eigen::Index i = 0;
        for (const auto& [r, c] : spec_.pattern.entries) lam_(r, c) = x(i++);
        sigma_.noalias() = lam_ * lam_.transpose();
        if (nu_ == 1) sigma_.diagonal().array() += x(nl_);
        else sigma_.diagonal() += x.tail(nu_);
        double log_det = 0.0;
        if (!try_spd_factor(sigma_, llt_, log_det)) return false;
        inv_ = llt_.solve(Matrix::Identity(p_, p_));
        inv_ = symmetrize(inv_);
        tmp_.noalias() = inv_ * s_;
        const double tr = tmp_.trace();
        kernel_.noalias() = -tmp_ * inv_;
        kernel_ += inv_;
        kernel_ = symmetrize(kernel_);
        f = -0.5 * (log_det + tr);
        g.resize(dim());
        klam_.noalias() = kernel_ * lam_;
        i = 0;
        for (const auto& [r, c] : spec_.pattern.entries) g(i++) = -klam_(r, c);
        if (nu_ == 1) g(nl_) = -0.5 * kernel_.trace();
        else g.tail(nu_) = -0.5 * kernel_.diagonal();
        return std::isfinite(f) && g.allFinite();
    }

    [[nodiscard]] Vector projected_step(const Vector& x, const Vector& g) const {
        Vector y = x + g;
        project(y);
        return y - x;
    }

    // Zeroes uniqueness coordinates held at a bound by an outward gradient.
    void mask_active(const Vector& x, const Vector& g, Vector& v) const {
        for (Eigen::Index j = nl_; j < dim(); ++j) {
            if ((x(j) <= spec_.bounds.psi_min && g(j) < 0.0) || (x(j) >= spec_.bounds.psi_max && g(j) > 0.0))
                v(j) = 0.0;
        }
    }

    [[nodiscard]] Vector spectral_start() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(s_);
        const Vector ev = es.eigenvalues();  // ascending
        const int rest = p_ - q_;
        double noise = 0.0;
        if (rest > 0) noise = ev.head(rest).mean();
        else noise = 0.5 * std::max(ev.minCoeff(), 0.0);
        FactorPoint pt;
        pt.loadings = Matrix::Zero(p_, q_);
        for (int h = 0; h < q_; ++h) {
            const Eigen::Index idx = p_ - 1 - h;
            const double lev = std::max(ev(idx), 0.0);
            const double scale = std::sqrt(std::max(lev - noise, 0.05 * lev + 1e-3));
            pt.loadings.col(h) = es.eigenvectors().col(idx) * scale;
        }
        pt.loadings = pt.loadings.cwiseProduct(spec_.pattern.mask());
        const double radius = spec_.bounds.loading_radius;
        if (pt.loadings.norm() > radius) pt.loadings *= 0.99 * radius / pt.loadings.norm();
        const Vector resid = (s_ - pt.loadings * pt.loadings.transpose()).diagonal();
        if (nu_ == 1) pt.uniqueness = Vector::Constant(1, resid.mean());
        else pt.uniqueness = resid;
        Vector x = pack(pt);
        project(x);
        return x;
    }

    [[nodiscard]] Vector random_start(Rng& rng) const {
        const double scale = std::sqrt(std::max(s_.diagonal().mean(), 1e-8));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        Vector x(dim());
        for (Eigen::Index i = 0; i < nl_; ++i) x(i) = scale * unit(rng);
        const double lo = spec_.bounds.psi_min;
        const double hi = std::clamp(s_.diagonal().maxCoeff(), lo, spec_.bounds.psi_max);
        std::uniform_real_distribution<double> psi(0.0, 1.0);
        for (Eigen::Index j = nl_; j < dim(); ++j) x(j) = lo + (hi - lo) * psi(rng);
        project(x);
        return x;
    }

private:
    const ModelSpec& spec_;
    const Matrix& s_;
    int p_, q_;
    Eigen::Index nl_, nu_;
    Matrix lam_, sigma_, inv_, tmp_, kernel_, klam_;
    Eigen::LLT<Matrix> llt_;
};

// Projected limited-memory quasi-Newton ascent from one starting point.
StartOutcome run_start(const ModelSpec& spec, const Matrix& s, long n, Vector x, const FitOptions& opts) {
    ClassProblem prob(spec, s);
    const double scale = static_cast<double>(n);
    const double tol = opts.tolerance_for(n) / scale;
    StartOutcome out;
    prob.project(x);

    double f = 0.0;
    Vector g;
    if (!prob.evaluate(x, f, g)) {
        out.finite = false;
        out.t_value = kNegInf;
        out.point = prob.unpack(x);
        out.sigma = assemble_sigma(out.point->loadings, out.point->uniqueness);
        return out;
    }

    struct Pair {
        Vector s, y;
        double rho;
    };
    std::deque<Pair> memory;
    bool force_gradient = false;
    int flat = 0;
    int it = 0;
    Vector xt, gt, d, gm;
    for (; it < opts.max_iters; ++it) {
        if (prob.projected_step(x, g).norm() <= tol) {
            out.converged = true;
            break;
        }
        gm = g;
        prob.mask_active(x, g, gm);
        if (force_gradient) memory.clear();
        force_gradient = false;

        // two-loop recursion on the ascent gradient
        d = gm;
        std::vector<double> alpha(memory.size());
        for (std::size_t k = memory.size(); k-- > 0;) {
            alpha[k] = memory[k].rho * memory[k].s.dot(d);
            d -= alpha[k] * memory[k].y;
        }
        if (!memory.empty()) {
            const auto& last = memory.back();
            d *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t k = 0; k < memory.size(); ++k) {
            const double beta = memory[k].rho * memory[k].y.dot(d);
            d += (alpha[k] - beta) * memory[k].s;
        }
        prob.mask_active(x, g, d);
        if (!d.allFinite() || d.dot(gm) <= 0.0) {
            memory.clear();
            d = gm;
        }
        double t = memory.empty() ? std::min(1.0, 1.0 / std::max(gm.norm(), 1e-300)) : 1.0;

        bool accepted = false;
        double ft = 0.0;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            xt = x + t * d;
            prob.project(xt);
            const Vector step = xt - x;
            if (step.squaredNorm() == 0.0) break;
            if (prob.evaluate(xt, ft, gt) && ft >= f + opts.armijo * g.dot(step)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!memory.empty()) {
                force_gradient = true;
                continue;
            }
            break;  // no ascent left at working precision
        }

        Vector s_step = xt - x;
        Vector y_step = g - gt;
        const double sy = s_step.dot(y_step);
        if (sy > 1e-12 * s_step.norm() * y_step.norm()) {
            memory.push_back({std::move(s_step), std::move(y_step), 1.0 / sy});
            if (static_cast<int>(memory.size()) > opts.lbfgs_memory) memory.pop_front();
        }
        const double df = ft - f;
        x = xt;
        f = ft;
        g = gt;
        if (std::abs(df) <= 1e-15 * std::max(1.0, std::abs(f))) {
            if (++flat >= 10) break;
        } else {
            flat = 0;
        }
    }

    out.iterations = it;
    const double pg = prob.projected_step(x, g).norm();
    out.converged = out.converged || pg <= tol;
    out.gradient_norm = pg * scale;
    out.point = prob.unpack(x);
    out.sigma = assemble_sigma(out.point->loadings, out.point->uniqueness);
    out.t_value = profiled_loglik(out.sigma, SampleMoments{n, Vector::Zero(s.rows()), s});
    return out;
}

void check_inputs(const ModelSpec& spec, const SampleMoments& moments) {
    require_valid(spec);
    if (moments.n < 1) throw ValidationError("sample size must be at least 1");
    if (moments.cov.rows() != spec.p() || moments.cov.cols() != spec.p())
        throw ValidationError("moment dimension does not match the model");
    if (!moments.cov.allFinite()) throw ValidationError("sample covariance has non-finite entries");
}

FitResult explicit_fit(const ModelSpec& spec, const SampleMoments& moments) {
    FitResult r;
    r.start_outcomes.reserve(spec.matrices.size());
    for (const auto& m : spec.matrices) {
        StartOutcome o;
        o.sigma = m;
        o.t_value = profiled_loglik(m, moments);
        o.converged = true;
        r.start_outcomes.push_back(std::move(o));
    }
    return r;
}

FitResult closed_form_fit(const ModelSpec& spec, const SampleMoments& moments, const FitOptions& opts) {
    const auto& b = spec.bounds;
    FactorPoint pt;
    pt.loadings = Matrix::Zero(spec.p(), 0);
    if (spec.error_type == ErrorType::diagonal) {
        pt.uniqueness = moments.cov.diagonal().cwiseMax(b.psi_min).cwiseMin(b.psi_max);
    } else {
        pt.uniqueness = Vector::Constant(1, std::clamp(moments.cov.trace() / spec.p(), b.psi_min, b.psi_max));
    }
    StartOutcome o;
    o.sigma = assemble_sigma(pt.loadings, pt.uniqueness);
    o.t_value = profiled_loglik(o.sigma, moments);
    o.gradient_norm = projected_gradient_norm(pt, spec, moments);
    o.converged = o.gradient_norm <= opts.tolerance_for(moments.n);
    o.point = std::move(pt);
    FitResult r;
    r.start_outcomes.push_back(std::move(o));
    return r;
}

void finalize(FitResult& r) {
    int best = -1;
    double best_value = kNegInf;
    r.starts_converged = 0;
    for (std::size_t s = 0; s < r.start_outcomes.size(); ++s) {
        const auto& o = r.start_outcomes[s];
        if (o.converged && o.finite) ++r.starts_converged;
        if (o.finite && (best < 0 || o.t_value > best_value)) {
            best = static_cast<int>(s);
            best_value = o.t_value;
        }
    }
    if (best < 0) {
        r.status = FitStatus::all_diverged;
        r.best_start = 0;
        r.t_value = kNegInf;
        r.sigma = r.start_outcomes.front().sigma;
        r.best_point = r.start_outcomes.front().point;
        r.gradient_norm_at_solution = std::numeric_limits<double>::infinity();
        return;
    }
    const auto& o = r.start_outcomes[static_cast<std::size_t>(best)];
    r.best_start = best;
    r.t_value = o.t_value;
    r.sigma = o.sigma;
    r.best_point = o.point;
    r.gradient_norm_at_solution = o.gradient_norm;
    r.status = o.converged ? FitStatus::converged : FitStatus::max_iters_reached;
}

Vector start_point(const ModelSpec& spec, const Matrix& s, const FitOptions& opts, std::uint64_t stream, int start) {
    ClassProblem prob(spec, s);
    if (start == 0) return prob.spectral_start();
    Rng rng = make_rng(opts.seed, {stream, static_cast<std::uint64_t>(start)});
    return prob.random_start(rng);
}

FitResult iterative_fit(const ModelSpec& spec, const SampleMoments& moments, const FitOptions& opts,
                        std::uint64_t stream, bool parallel) {
    if (opts.starts < 1) throw ValidationError("starts must be at least 1");
    if (opts.max_iters < 1) throw ValidationError("max_iters must be at least 1");
    if (opts.grad_tolerance && !(*opts.grad_tolerance > 0.0)) throw ValidationError("grad_tolerance must be positive");
    FitResult r;
    r.start_outcomes.resize(static_cast<std::size_t>(opts.starts));
    if (parallel) {
        const int workers = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1 && opts.starts > 1)
        for (int s = 0; s < opts.starts; ++s) {
            r.start_outcomes[static_cast<std::size_t>(s)] =
                run_start(spec, moments.cov, moments.n, start_point(spec, moments.cov, opts, stream, s), opts);
        }
    } else {
        for (int s = 0; s < opts.starts; ++s) {
            r.start_outcomes[static_cast<std::size_t>(s)] =
                run_start(spec, moments.cov, moments.n, start_point(spec, moments.cov, opts, stream, s), opts);
        }
    }
    return r;
}

FitResult fit_impl(const ModelSpec& spec, const SampleMoments& moments, const FitOptions& opts, std::uint64_t stream,
                   bool parallel) {
    check_inputs(spec, moments);
    FitResult r;
    if (spec.kind == ModelKind::explicit_set) r = explicit_fit(spec, moments);
    else if (spec.pattern.size() == 0) r = closed_form_fit(spec, moments, opts);
    else r = iterative_fit(spec, moments, opts, stream, parallel);
    finalize(r);
    return r;
}

// Small dense Cholesky on raw buffers for the brute-force scan.
class GridEvaluator {
public:
    GridEvaluator(const Matrix& s) : p_(static_cast<int>(s.rows())), a_(p_ * p_), z_(p_ * p_) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(s);
        const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const Matrix r = es.eigenvectors() * root.asDiagonal();
        root_.assign(r.data(), r.data() + r.size());
    }

    // Per-observation criterion for Sigma = llt + diag(psi); -inf if not PD.
    double operator()(const Matrix& llt, const double* psi, bool spherical) {
        for (int j = 0; j < p_; ++j)
            for (int i = 0; i < p_; ++i) a_[i + j * p_] = llt(i, j);
        for (int i = 0; i < p_; ++i) a_[i + i * p_] += spherical ? psi[0] : psi[i];
        double log_det = 0.0;
        for (int j = 0; j < p_; ++j) {
            double d = a_[j + j * p_];
            for (int k = 0; k < j; ++k) d -= a_[j + k * p_] * a_[j + k * p_];
            if (!(d > 0.0)) return kNegInf;
            const double ljj = std::sqrt(d);
            a_[j + j * p_] = ljj;
            log_det += 2.0 * std::log(ljj);
            for (int i = j + 1; i < p_; ++i) {
                double v = a_[i + j * p_];
                for (int k = 0; k < j; ++k) v -= a_[i + k * p_] * a_[j + k * p_];
                a_[i + j * p_] = v / ljj;
            }
        }
        // tr(Sigma^{-1} S) = ||L^{-1} R||_F^2 with S = R R^T
        double tr = 0.0;
        for (int c = 0; c < p_; ++c) {
            for (int i = 0; i < p_; ++i) {
                double v = root_[i + c * p_];
                for (int k = 0; k < i; ++k) v -= a_[i + k * p_] * z_[k + c * p_];
                v /= a_[i + i * p_];
                z_[i + c * p_] = v;
                tr += v * v;
            }
        }
        return -0.5 * (log_det + tr);
    }

private:
    int p_;
    std::vector<double> a_, z_, root_;
};

struct GridLayout {
    int per_axis;
    Eigen::Index nl, nu;
    long long loading_cells, psi_cells;

    [[nodiscard]] double axis_value(int i, double lo, double hi) const {
        if (per_axis == 1) return 0.5 * (lo + hi);
        return lo + (hi - lo) * static_cast<double>(i) / (per_axis - 1);
    }
};

GridLayout layout_for(const ModelSpec& spec, int grid_per_axis) {
    if (spec.kind != ModelKind::factor_class) throw ValidationError("brute-force fit needs a factor_class model");
    if (grid_per_axis < 1) throw ValidationError("grid_per_axis must be positive");
    GridLayout g{grid_per_axis, static_cast<Eigen::Index>(spec.pattern.size()), spec.uniqueness_count(), 1, 1};
    const double total = std::pow(static_cast<double>(grid_per_axis), static_cast<double>(g.nl + g.nu));
    if (total > 1e7) throw ValidationError("brute-force grid exceeds 1e7 points");
    for (Eigen::Index i = 0; i < g.nl; ++i) g.loading_cells *= grid_per_axis;
    for (Eigen::Index i = 0; i < g.nu; ++i) g.psi_cells *= grid_per_axis;
    return g;
}

Matrix grid_loadings(const ModelSpec& spec, const GridLayout& g, long long cell) {
    const double radius = spec.bounds.loading_radius;
    Matrix lam = Matrix::Zero(spec.pattern.p, spec.pattern.q);
    for (const auto& [r, c] : spec.pattern.entries) {
        lam(r, c) = g.axis_value(static_cast<int>(cell % g.per_axis), -radius, radius);
        cell /= g.per_axis;
    }
    const double norm = lam.norm();
    if (norm > radius) lam *= radius / norm;
    return lam;
}

void grid_psi(const ModelSpec& spec, const GridLayout& g, long long cell, std::vector<double>& psi) {
    psi.resize(static_cast<std::size_t>(g.nu));
    for (auto& v : psi) {
        v = g.axis_value(static_cast<int>(cell % g.per_axis), spec.bounds.psi_min, spec.bounds.psi_max);
        cell /= g.per_axis;
    }
}

struct GridBest {
    double value = kNegInf;
    long long index = -1;

    void offer(double v, long long idx) {
        if (v > value || (v == value && idx < index)) value = v, index = idx;
    }
};

GridBest scan_loading_cell(const ModelSpec& spec, const GridLayout& g, GridEvaluator& eval, long long lc) {
    const Matrix lam = grid_loadings(spec, g, lc);
    const Matrix llt = lam * lam.transpose();
    const bool spherical = spec.error_type == ErrorType::spherical;
    std::vector<double> psi;
    GridBest best;
    for (long long pc = 0; pc < g.psi_cells; ++pc) {
        grid_psi(spec, g, pc, psi);
        best.offer(eval(llt, psi.data(), spherical), lc * g.psi_cells + pc);
    }
    return best;
}

FitResult grid_result(const ModelSpec& spec, const SampleMoments& moments, const GridLayout& g, const GridBest& best) {
    FactorPoint pt;
    pt.loadings = grid_loadings(spec, g, best.index / g.psi_cells);
    std::vector<double> psi;
    grid_psi(spec, g, best.index % g.psi_cells, psi);
    pt.uniqueness = Eigen::Map<const Vector>(psi.data(), static_cast<Eigen::Index>(psi.size()));
    StartOutcome o;
    o.sigma = assemble_sigma(pt.loadings, pt.uniqueness);
    o.t_value = profiled_loglik(o.sigma, moments);
    o.gradient_norm = projected_gradient_norm(pt, spec, moments);
    o.point = std::move(pt);
    FitResult r;
    r.start_outcomes.push_back(std::move(o));
    finalize(r);
    r.starts_converged = 0;
    r.status = FitStatus::converged;
    return r;
}

}  // namespace

FitResult fit_class(const ModelSpec& spec, const SampleMoments& moments, const FitOptions& opts, std::uint64_t stream) {
    return fit_impl(spec, moments, opts, stream, true);
}

FitResult fit_class_reference(const ModelSpec& spec, const SampleMoments& moments, const FitOptions& opts,
                              std::uint64_t stream) {
    return fit_impl(spec, moments, opts, stream, false);
}

FitResult brute_force_fit(const ModelSpec& spec, const SampleMoments& moments, int grid_per_axis) {
    check_inputs(spec, moments);
    const GridLayout g = layout_for(spec, grid_per_axis);
    GridBest best;
#pragma omp parallel
    {
        GridEvaluator eval(moments.cov);
        GridBest local;
#pragma omp for schedule(static) nowait
        for (long long lc = 0; lc < g.loading_cells; ++lc) {
            const GridBest b = scan_loading_cell(spec, g, eval, lc);
            local.offer(b.value, b.index);
        }
#pragma omp critical(covsel_grid_best)
        best.offer(local.value, local.index);
    }
    if (best.index < 0) throw NumericalError("brute-force grid produced no finite value");
    return grid_result(spec, moments, g, best);
}

FitResult brute_force_fit_reference(const ModelSpec& spec, const SampleMoments& moments, int grid_per_axis) {
    check_inputs(spec, moments);
    const GridLayout g = layout_for(spec, grid_per_axis);
    GridEvaluator eval(moments.cov);
    GridBest best;
    for (long long lc = 0; lc < g.loading_cells; ++lc) {
        const GridBest b = scan_loading_cell(spec, g, eval, lc);
        best.offer(b.value, b.index);
    }
    if (best.index < 0) throw NumericalError("brute-force grid produced no finite value");
    return grid_result(spec, moments, g, best);
}

void project_point(FactorPoint& point, const ModelSpec& spec) {
    point.loadings = point.loadings.cwiseProduct(spec.pattern.mask());
    const double norm = point.loadings.norm();
    if (norm > spec.bounds.loading_radius) point.loadings *= spec.bounds.loading_radius / norm;
    point.uniqueness = point.uniqueness.cwiseMax(spec.bounds.psi_min).cwiseMin(spec.bounds.psi_max);
}

double projected_gradient_norm(const FactorPoint& point, const ModelSpec& spec, const SampleMoments& moments) {
    if (spec.kind != ModelKind::factor_class) return 0.0;
    ClassProblem prob(spec, moments.cov);
    const Vector x = prob.pack(point);
    const double n = static_cast<double>(moments.n);
    const Vector g = grad_profiled(point, spec, moments).flat() / n;
    return n * prob.projected_step(x, g).norm();
}

}  // namespace covsel
