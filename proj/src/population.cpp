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

#include "covsel/population.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "covsel/errors.hpp"
#include "covsel/rng.hpp"

namespace covsel {

namespace {

double default_epsilon_v(double v) { return 1e-6 * std::abs(v) + 1e-9; }

}  // namespace

PopulationFit population_fit(const ModelSpec& spec, const PopulationTarget& target, const PopulationOptions& opts,
                             std::uint64_t stream) {
    if (target.cov.rows() != spec.p()) throw ValidationError("target dimension does not match the model");
    if (!is_positive_definite(target.cov)) throw ValidationError("target covariance must be positive definite");
    PopulationFit out;
    out.fit = fit_class(spec, as_moments(target), opts.fit, stream);
    out.value = out.fit.t_value;
    const double eps_v = opts.epsilon_v.value_or(default_epsilon_v(out.value));

    std::vector<std::size_t> order(out.fit.start_outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    const auto& starts = out.fit.start_outcomes;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return starts[a].t_value > starts[b].t_value; });
    for (std::size_t idx : order) {
        const auto& s = starts[idx];
        if (!s.finite || s.t_value < out.value - eps_v) continue;
        bool fresh = true;
        for (const auto& rep : out.maximizers)
            if ((rep - s.sigma).norm() <= opts.epsilon_cluster) fresh = false;
        if (fresh) {
            out.maximizers.push_back(s.sigma);
            out.points.push_back(s.point);
        }
    }
    return out;
}

std::vector<Matrix> PopulationSummary::common_reps() const {
    std::vector<Matrix> out;
    for (int k : k_star)
        for (const auto& m : pseudo_true_reps[static_cast<std::size_t>(k)]) {
            bool fresh = true;
            for (const auto& r : out)
                if ((r - m).norm() <= epsilon_cluster) fresh = false;
            if (fresh) out.push_back(m);
        }
    return out;
}

PopulationSummary pseudo_true_summary(const CandidateFamily& family, const PopulationTarget& target,
                                      const PopulationOptions& opts) {
    require_valid(family);
    const auto m = static_cast<int>(family.models.size());
    std::vector<PopulationFit> fits(static_cast<std::size_t>(m));
    const int workers = opts.fit.threads > 0 ? opts.fit.threads : omp_get_max_threads();
    // Per-model fits are independent; each model's stream is its index.
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1 && m > 1)
    for (int k = 0; k < m; ++k) {
        PopulationOptions inner = opts;
        inner.fit.threads = 1;
        fits[static_cast<std::size_t>(k)] =
            population_fit(family.models[static_cast<std::size_t>(k)], target, inner, static_cast<std::uint64_t>(k));
    }

    PopulationSummary s;
    s.epsilon_cluster = opts.epsilon_cluster;
    s.v_star = -std::numeric_limits<double>::infinity();
    for (const auto& f : fits) {
        s.v_values.push_back(f.value);
        s.v_star = std::max(s.v_star, f.value);
        s.pseudo_true_reps.push_back(f.maximizers);
        s.pseudo_true_points.push_back(f.points);
    }
    s.epsilon_v = opts.epsilon_v.value_or(default_epsilon_v(s.v_star));
    for (int k = 0; k < m; ++k)
        if (s.v_values[static_cast<std::size_t>(k)] >= s.v_star - s.epsilon_v) s.k_star.push_back(k);
    s.q_star = std::numeric_limits<int>::max();
    for (int k : s.k_star) s.q_star = std::min(s.q_star, family.models[static_cast<std::size_t>(k)].order());
    for (int k : s.k_star)
        if (family.models[static_cast<std::size_t>(k)].order() == s.q_star) s.k_zero.push_back(k);
    s.d_star = std::numeric_limits<double>::infinity();
    for (int k : s.k_zero) s.d_star = std::min(s.d_star, family.complexities[static_cast<std::size_t>(k)]);
    for (int k : s.k_zero)
        if (family.complexities[static_cast<std::size_t>(k)] == s.d_star) s.k_double_star.push_back(k);
    return s;
}

double hausdorff_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    if (a.empty() || b.empty()) throw ValidationError("Hausdorff distance needs nonempty sets");
    auto directed = [](const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
        double worst = 0.0;
        for (const auto& u : x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : y) best = std::min(best, (u - v).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs at least two paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw NumericalError("line fit needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

AssumptionDiagnostics diagnose_assumptions(const CandidateFamily& family, const PopulationSummary& summary,
                                           const PopulationTarget& target, int probe_count, double eta,
                                           const PopulationOptions& opts) {
    require_valid(family);
    if (summary.v_values.size() != family.models.size())
        throw ValidationError("population summary does not belong to this family");
    if (probe_count < 1) throw ValidationError("probe_count must be positive");
    if (!(eta > 0.0)) throw ValidationError("eta must be positive");

    AssumptionDiagnostics d;
    d.m2_threshold = 10.0 * summary.epsilon_cluster;
    for (std::size_t i = 0; i < summary.k_star.size(); ++i)
        for (std::size_t j = i + 1; j < summary.k_star.size(); ++j) {
            const auto& a = summary.pseudo_true_reps[static_cast<std::size_t>(summary.k_star[i])];
            const auto& b = summary.pseudo_true_reps[static_cast<std::size_t>(summary.k_star[j])];
            d.m2_hausdorff = std::max(d.m2_hausdorff, hausdorff_distance(a, b));
        }
    d.m2_pass = d.m2_hausdorff <= d.m2_threshold;
    d.notes.emplace_back("pseudo-true sets are represented by clustered optimizer outputs, not certified sets");

    const std::vector<Matrix> g_star = summary.common_reps();
    auto dist_to_g = [&](const Matrix& s) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : g_star) best = std::min(best, (s - r).norm());
        return best;
    };

    for (int k : summary.k_star) {
        const auto& spec = family.models[static_cast<std::size_t>(k)];
        std::vector<double> log_dist, log_gap;
        int rejected = 0;
        auto offer = [&](const Matrix& sigma) {
            const double dist = dist_to_g(sigma);
            if (!(dist > 1e-12 && dist < eta)) {
                ++rejected;
                return;
            }
            const double gap = summary.v_star - population_q(sigma, target);
            if (!(gap > 0.0)) {
                ++rejected;
                return;
            }
            log_dist.push_back(std::log(dist));
            log_gap.push_back(std::log(gap));
        };

        if (spec.kind == ModelKind::explicit_set) {
            for (const auto& mtx : spec.matrices) offer(mtx);
        } else {
            const auto& pts = summary.pseudo_true_points[static_cast<std::size_t>(k)];
            if (pts.empty() || !pts.front()) {
                d.notes.push_back("model " + std::to_string(k) + ": no representative point to probe");
            } else {
                const FactorPoint base = *pts.front();
                Rng rng = make_rng(opts.fit.seed, {0x4d33ULL, static_cast<std::uint64_t>(k)});
                std::normal_distribution<double> gauss(0.0, 1.0);
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                const Matrix mask = spec.pattern.mask();
                for (int attempt = 0; attempt < 20 * probe_count && static_cast<int>(log_dist.size()) < probe_count;
                     ++attempt) {
                    FactorPoint probe = base;
                    Matrix dl = Matrix::Zero(base.loadings.rows(), base.loadings.cols());
                    for (Eigen::Index r = 0; r < dl.rows(); ++r)
                        for (Eigen::Index c = 0; c < dl.cols(); ++c) dl(r, c) = mask(r, c) * gauss(rng);
                    Vector du(base.uniqueness.size());
                    for (Eigen::Index j = 0; j < du.size(); ++j) du(j) = gauss(rng);
                    const double norm = std::sqrt(dl.squaredNorm() + du.squaredNorm());
                    const double radius = eta * std::pow(10.0, -1.5 * unit(rng));
                    probe.loadings += (radius / norm) * dl;
                    probe.uniqueness += (radius / norm) * du;
                    project_point(probe, spec);
                    offer(assemble_sigma(probe.loadings, probe.uniqueness));
                }
            }
        }

        d.models.push_back(k);
        d.m3_probes_used.push_back(static_cast<int>(log_dist.size()));
        if (log_dist.size() < 3) {
            d.m3_exponents.emplace_back(std::nullopt);
            d.m3_constants.emplace_back(std::nullopt);
            d.m3_verdicts.emplace_back("insufficient");
            d.notes.push_back("model " + std::to_string(k) + ": too few probes inside the eta-ball (" +
                              std::to_string(log_dist.size()) + " accepted, " + std::to_string(rejected) +
                              " rejected)");
            continue;
        }
        const LineFit line = least_squares_line(log_dist, log_gap);
        d.m3_exponents.emplace_back(line.slope);
        d.m3_constants.emplace_back(std::exp(line.intercept));
        const bool quadratic = line.slope >= d.m3_exponent_low && line.slope <= d.m3_exponent_high;
        d.m3_verdicts.emplace_back(quadratic ? "pass" : "warn");
    }
    return d;
}

double margin_constant_correct_spec(const PopulationTarget& target) {
    if (!is_positive_definite(target.cov)) throw ValidationError("target covariance must be positive definite");
    const double op = symmetric_eigenvalues(target.cov).maxCoeff();
    return 1.0 / (4.0 * op * op);
}

}  // namespace covsel
