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

#include "covsel/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "covsel/errors.hpp"
#include "covsel/rng.hpp"

namespace covsel {

std::string to_string(LawKind k) {
    switch (k) {
        case LawKind::gaussian: return "gaussian";
        case LawKind::student_t: return "student_t";
        case LawKind::scale_mixture: return "scale_mixture";
    }
    return "unknown";
}

namespace {

void validate_law(const DataLaw& law) {
    if (law.cov.rows() == 0 || law.cov.rows() != law.cov.cols()) throw ValidationError("law covariance must be square");
    if (law.mean.size() != law.cov.rows()) throw ValidationError("law mean and covariance dimensions differ");
    if (!is_symmetric(law.cov) || !is_positive_definite(law.cov))
        throw ValidationError("law covariance must be symmetric positive definite");
    if (law.kind == LawKind::student_t && !(law.dof > 4.0))
        throw ValidationError("student_t needs dof > 4 for a finite fourth moment");
    if (law.kind == LawKind::scale_mixture) {
        if (!(law.mix_weight > 0.0 && law.mix_weight < 1.0)) throw ValidationError("mixture weight must lie in (0, 1)");
        if (!(law.mix_low > 0.0 && law.mix_high > 0.0)) throw ValidationError("mixture levels must be positive");
    }
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double quantile_of(std::vector<double> v, double prob) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = prob * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TracePoint summarize(long n, std::vector<double> values) {
    TracePoint t;
    t.n = n;
    t.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    t.median = median_of(values);
    t.q10 = quantile_of(values, 0.1);
    t.q90 = quantile_of(values, 0.9);
    t.values = std::move(values);
    return t;
}

void validate_grid(const std::vector<long>& grid) {
    if (grid.empty()) throw ValidationError("n grid must be nonempty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1) throw ValidationError("sample sizes must be positive");
        if (i > 0 && grid[i] <= grid[i - 1]) throw ValidationError("n grid must be strictly increasing");
    }
}

void validate_plan(const MonteCarloPlan& plan) {
    validate_grid(plan.n_grid);
    if (plan.replications < 1) throw ValidationError("replications must be at least 1");
    if (plan.systems.empty()) throw ValidationError("plan needs at least one penalty system");
    require_valid(plan.family);
    validate_law(plan.law);
    if (plan.law.p() != plan.family.p()) throw ValidationError("law dimension does not match the family");
    for (const auto& s : plan.systems)
        for (long n : plan.n_grid) (void)family_penalties(s, plan.family.complexities, n);
}

struct CellOutcome {
    std::vector<int> selected;   // per system
    std::vector<double> margin;  // per system
};

CellOutcome run_cell(const MonteCarloPlan& plan, const FitOptions& opts, int replication, std::size_t n_index) {
    const long n = plan.n_grid[n_index];
    const std::uint64_t seed = cell_seed(plan.seed, replication, n);
    const SampleMoments moments = compute_moments(generate_data(plan.law, n, seed));
    FitOptions inner = opts;
    inner.seed = derive_seed(seed, {0x666974ULL});
    inner.threads = 1;
    const auto fits = fit_family(plan.family, moments, inner);
    CellOutcome out;
    for (const auto& system : plan.systems) {
        const auto rep = select_from_fits(plan.family, fits, n, system);
        out.selected.push_back(rep.selected_index);
        out.margin.push_back(rep.runner_up_margin);
    }
    return out;
}

McReport aggregate(const MonteCarloPlan& plan, const std::vector<CellOutcome>& outcomes) {
    const std::size_t ng = plan.n_grid.size();
    const std::size_t m = plan.family.models.size();
    const auto reps = static_cast<std::size_t>(plan.replications);
    McReport report;
    report.replication_seeds.assign(reps, std::vector<std::uint64_t>(ng));
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t i = 0; i < ng; ++i)
            report.replication_seeds[r][i] = cell_seed(plan.seed, static_cast<int>(r), plan.n_grid[i]);

    for (std::size_t s = 0; s < plan.systems.size(); ++s) {
        for (std::size_t i = 0; i < ng; ++i) {
            McCell cell;
            cell.system = plan.systems[s].name();
            cell.n = plan.n_grid[i];
            cell.model_frequency.assign(m, 0.0);
            std::vector<int> model_count(m, 0);
            std::map<int, int> order_count;
            for (const auto& spec : plan.family.models) order_count.emplace(spec.order(), 0);
            std::vector<double> margins;
            int decisive = 0;
            const double threshold = report.decisive_threshold_per_n * static_cast<double>(cell.n);
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& o = outcomes[r * ng + i];
                const int k = o.selected[s];
                ++model_count[static_cast<std::size_t>(k)];
                const int q = plan.family.models[static_cast<std::size_t>(k)].order();
                ++order_count[q];
                cell.selected_orders.push_back(q);
                margins.push_back(o.margin[s]);
                if (o.margin[s] > threshold) ++decisive;
            }
            const double denom = static_cast<double>(reps);
            for (std::size_t k = 0; k < m; ++k) cell.model_frequency[k] = model_count[k] / denom;
            for (const auto& [q, c] : order_count) cell.order_frequency[q] = c / denom;
            cell.mean_margin = std::accumulate(margins.begin(), margins.end(), 0.0) / denom;
            cell.median_margin = median_of(margins);
            cell.decisive_fraction = decisive / denom;
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

// T_k,n and U_n along sample paths: result[r][i] for replication r and n_grid[i].
struct PathValues {
    std::vector<std::vector<double>> t;
    std::vector<std::vector<double>> u;
};

PathValues path_values(const ModelSpec& spec, int model_index, const DataLaw& law, const std::vector<Matrix>& g_star,
                       const std::vector<long>& n_grid, int replications, std::uint64_t seed, const FitOptions& opts) {
    PathValues pv;
    pv.t.assign(static_cast<std::size_t>(replications), std::vector<double>(n_grid.size()));
    pv.u = pv.t;
    const int workers = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
    for (int r = 0; r < replications; ++r) {
        const Matrix data = generate_data(law, n_grid.back(), derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            const long n = n_grid[i];
            const SampleMoments moments = compute_moments(data.topRows(n));
            FitOptions inner = opts;
            inner.threads = 1;
            inner.seed = derive_seed(seed, {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(n), 0x666974ULL});
            const FitResult fit = fit_class(spec, moments, inner, static_cast<std::uint64_t>(model_index));
            double u = -std::numeric_limits<double>::infinity();
            for (const auto& g : g_star) u = std::max(u, profiled_loglik(g, moments));
            pv.t[static_cast<std::size_t>(r)][i] = fit.t_value;
            pv.u[static_cast<std::size_t>(r)][i] = u;
        }
    }
    return pv;
}

// Benchmark covariances for U_n: the exact target when G* is the singleton {Sigma_0}.
std::vector<Matrix> benchmark_set(const PopulationSummary& summary, const PopulationTarget& target, bool& exact) {
    std::vector<Matrix> reps = summary.common_reps();
    exact = reps.size() == 1 && (reps.front() - target.cov).norm() <= summary.epsilon_cluster;
    if (exact) reps.front() = target.cov;
    return reps;
}

}  // namespace

Matrix generate_data(const DataLaw& law, long n, std::uint64_t seed) {
    validate_law(law);
    if (n < 1) throw ValidationError("sample size must be positive");
    const int p = law.p();
    const Matrix chol = Eigen::LLT<Matrix>(law.cov).matrixL();
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(law.kind == LawKind::student_t ? law.dof : 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double mix_mean = law.mix_weight * law.mix_low + (1.0 - law.mix_weight) * law.mix_high;
    Matrix out(n, p);
    Vector z(p);
    for (long t = 0; t < n; ++t) {
        for (int j = 0; j < p; ++j) z(j) = gauss(rng);
        double scale = 1.0;
        if (law.kind == LawKind::student_t) {
            // z sqrt(nu / W) has covariance nu/(nu-2); rescale to unit covariance
            scale = std::sqrt((law.dof - 2.0) / chi2(rng));
        } else if (law.kind == LawKind::scale_mixture) {
            const double level = unit(rng) < law.mix_weight ? law.mix_low : law.mix_high;
            scale = std::sqrt(level / mix_mean);
        }
        out.row(t) = (law.mean + scale * (chol * z)).transpose();
    }
    return out;
}

std::uint64_t cell_seed(std::uint64_t plan_seed, int replication, long n) {
    return derive_seed(plan_seed, {static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(n)});
}

const McCell& McReport::cell(const std::string& system, long n) const {
    for (const auto& c : cells)
        if (c.system == system && c.n == n) return c;
    throw ValidationError("no Monte Carlo cell for " + system + " at n = " + std::to_string(n));
}

McReport run_monte_carlo(const MonteCarloPlan& plan, const FitOptions& opts) {
    validate_plan(plan);
    const std::size_t ng = plan.n_grid.size();
    const auto units = static_cast<long>(static_cast<std::size_t>(plan.replications) * ng);
    std::vector<CellOutcome> outcomes(static_cast<std::size_t>(units));
    const int workers = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
    for (long u = 0; u < units; ++u) {
        const auto r = static_cast<int>(static_cast<std::size_t>(u) / ng);
        const std::size_t i = static_cast<std::size_t>(u) % ng;
        outcomes[static_cast<std::size_t>(u)] = run_cell(plan, opts, r, i);
    }
    return aggregate(plan, outcomes);
}

McReport run_monte_carlo_reference(const MonteCarloPlan& plan, const FitOptions& opts) {
    validate_plan(plan);
    const std::size_t ng = plan.n_grid.size();
    std::vector<CellOutcome> outcomes;
    for (int r = 0; r < plan.replications; ++r)
        for (std::size_t i = 0; i < ng; ++i) outcomes.push_back(run_cell(plan, opts, r, i));
    return aggregate(plan, outcomes);
}

OverfitGainTrace overfit_gain_trace(const CandidateFamily& family, const DataLaw& law, int k_overfit,
                                    const std::vector<long>& n_grid, int replications, std::uint64_t seed,
                                    const FitOptions& opts, const PopulationOptions& pop_opts) {
    validate_law(law);
    validate_grid(n_grid);
    if (replications < 1) throw ValidationError("replications must be at least 1");
    require_valid(family);
    if (k_overfit < 0 || static_cast<std::size_t>(k_overfit) >= family.models.size())
        throw ValidationError("model index out of range");
    const PopulationTarget target = law.target();
    const PopulationSummary summary = pseudo_true_summary(family, target, pop_opts);
    const bool optimal = std::find(summary.k_star.begin(), summary.k_star.end(), k_overfit) != summary.k_star.end();
    const auto& spec = family.models[static_cast<std::size_t>(k_overfit)];
    if (!optimal || spec.order() <= summary.q_star)
        throw ValidationError("model " + std::to_string(k_overfit) +
                              " is not an exact overfit (needs a globally optimal model of order above q*)");

    OverfitGainTrace trace;
    trace.model = k_overfit;
    const auto g_star = benchmark_set(summary, target, trace.benchmark_exact);
    if (!trace.benchmark_exact)
        trace.notes.emplace_back("U_n uses clustered representatives of the pseudo-true set, not an exact set");
    const PathValues pv = path_values(spec, k_overfit, law, g_star, n_grid, replications, seed, opts);

    std::vector<double> log_n, ratio_ll;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        std::vector<double> gains;
        for (int r = 0; r < replications; ++r)
            gains.push_back(pv.t[static_cast<std::size_t>(r)][i] - pv.u[static_cast<std::size_t>(r)][i]);
        TracePoint tp = summarize(n_grid[i], std::move(gains));
        const double ln = std::log(static_cast<double>(n_grid[i]));
        trace.median_over_log_n.push_back(tp.median / ln);
        trace.median_over_log_log_n.push_back(ln > 1.0 ? tp.median / std::log(ln) : std::nan(""));
        log_n.push_back(ln);
        ratio_ll.push_back(trace.median_over_log_log_n.back());
        trace.points.push_back(std::move(tp));
    }
    if (n_grid.size() >= 2 && n_grid.front() >= 3) trace.slope_vs_log_n = least_squares_line(log_n, ratio_ll).slope;
    return trace;
}

SuboptimalLossTrace suboptimal_loss_trace(const CandidateFamily& family, const DataLaw& law, int k_sub,
                                          const std::vector<long>& n_grid, int replications, std::uint64_t seed,
                                          const FitOptions& opts, const PopulationOptions& pop_opts) {
    validate_law(law);
    validate_grid(n_grid);
    if (replications < 1) throw ValidationError("replications must be at least 1");
    require_valid(family);
    if (k_sub < 0 || static_cast<std::size_t>(k_sub) >= family.models.size())
        throw ValidationError("model index out of range");
    const PopulationTarget target = law.target();
    const PopulationSummary summary = pseudo_true_summary(family, target, pop_opts);
    if (std::find(summary.k_star.begin(), summary.k_star.end(), k_sub) != summary.k_star.end())
        throw ValidationError("model " + std::to_string(k_sub) + " is globally optimal, not suboptimal");

    SuboptimalLossTrace trace;
    trace.model = k_sub;
    trace.population_limit = -(summary.v_star - summary.v_values[static_cast<std::size_t>(k_sub)]);
    const auto g_star = benchmark_set(summary, target, trace.benchmark_exact);
    if (!trace.benchmark_exact)
        trace.notes.emplace_back("U_n uses clustered representatives of the pseudo-true set, not an exact set");
    const auto& spec = family.models[static_cast<std::size_t>(k_sub)];
    const PathValues pv = path_values(spec, k_sub, law, g_star, n_grid, replications, seed, opts);
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        std::vector<double> loss;
        const double n = static_cast<double>(n_grid[i]);
        for (int r = 0; r < replications; ++r)
            loss.push_back((pv.t[static_cast<std::size_t>(r)][i] - pv.u[static_cast<std::size_t>(r)][i]) / n);
        trace.points.push_back(summarize(n_grid[i], std::move(loss)));
    }
    return trace;
}

double sigma_plus(double sigma_minus) {
    if (!(sigma_minus > 0.0 && sigma_minus < 1.0)) throw ValidationError("sigma_minus must lie in (0, 1)");
    auto level = [](double s) { return std::log(s) + 1.0 / s; };
    const double target = level(sigma_minus);
    auto f = [&](double s) { return level(s) - target; };
    double hi = 2.0;
    while (f(hi) < 0.0) hi *= 2.0;
    // bracket endpoints stay within 1e-12 of each other at termination
    auto stop = [](double a, double b) { return std::abs(b - a) <= std::min(1e-12, 4 * std::numeric_limits<double>::epsilon() * std::abs(b)); };
    const auto [a, b] = boost::math::tools::bisect(f, 1.0, hi, stop);
    const double root = 0.5 * (a + b);
    if (std::abs(f(root)) > 1e-10) throw NumericalError("sigma_plus residual check failed");
    return root;
}

PathologyReport pathology_two_point(double sigma_minus, const std::vector<long>& n_grid, int replications,
                                    std::uint64_t seed, const std::vector<PenaltySystem>& systems) {
    validate_grid(n_grid);
    if (replications < 1) throw ValidationError("replications must be at least 1");
    PathologyReport report;
    report.sigma_minus = sigma_minus;
    report.sigma_plus = sigma_plus(sigma_minus);
    const double coef = 1.0 / sigma_minus - 1.0 / report.sigma_plus;
    // Var(S_n) ~ 2/n for Gaussian data with unit variance
    report.predicted_sd_over_sqrt_n = 0.5 * coef * std::sqrt(2.0);

    CandidateFamily family;
    family.models.push_back(ModelSpec::explicit_set({Matrix::Constant(1, 1, sigma_minus)}, 0));
    family.models.push_back(ModelSpec::explicit_set({Matrix::Constant(1, 1, report.sigma_plus)}, 0));
    family.complexities = {1.0, 1.0};
    DataLaw law;
    law.mean = Vector::Zero(1);
    law.cov = Matrix::Identity(1, 1);
    std::vector<PenaltySystem> used = systems.empty() ? std::vector<PenaltySystem>{PenaltySystem::named(PenaltyKind::bic)} : systems;
    for (const auto& s : used)
        for (long n : n_grid) (void)family_penalties(s, family.complexities, n);

    for (long n : n_grid) {
        PathologyCell cell;
        cell.n = n;
        cell.contrasts.assign(static_cast<std::size_t>(replications), 0.0);
        std::vector<double> errors(static_cast<std::size_t>(replications), 0.0);
        std::vector<std::vector<int>> picks(used.size(), std::vector<int>(static_cast<std::size_t>(replications)));
#pragma omp parallel for schedule(static)
        for (int r = 0; r < replications; ++r) {
            const SampleMoments moments = compute_moments(generate_data(law, n, cell_seed(seed, r, n)));
            FitOptions fo;
            const double t1 = fit_class(family.models[0], moments, fo).t_value;
            const double t2 = fit_class(family.models[1], moments, fo).t_value;
            const double contrast = t1 - t2;
            const double closed = -0.5 * static_cast<double>(n) * (moments.cov(0, 0) - 1.0) * coef;
            cell.contrasts[static_cast<std::size_t>(r)] = contrast;
            errors[static_cast<std::size_t>(r)] = std::abs(contrast - closed) / std::max(1.0, std::abs(contrast));
            for (std::size_t s = 0; s < used.size(); ++s) {
                picks[s][static_cast<std::size_t>(r)] =
                    select_from_values(family, {t1, t2}, {ModelStatus::ok, ModelStatus::ok}, n, used[s]).selected_index;
            }
        }
        const double sqrt_n = std::sqrt(static_cast<double>(n));
        double mean = 0.0;
        for (double c : cell.contrasts) mean += c / sqrt_n;
        mean /= replications;
        double var = 0.0;
        for (double c : cell.contrasts) var += (c / sqrt_n - mean) * (c / sqrt_n - mean);
        cell.contrast_mean_over_sqrt_n = mean;
        cell.contrast_sd_over_sqrt_n = replications > 1 ? std::sqrt(var / (replications - 1)) : 0.0;
        cell.max_identity_error = *std::max_element(errors.begin(), errors.end());
        for (std::size_t s = 0; s < used.size(); ++s) {
            std::vector<double> freq(2, 0.0);
            for (int k : picks[s]) freq[static_cast<std::size_t>(k)] += 1.0 / replications;
            cell.selection_frequency[used[s].name()] = freq;
        }
        report.cells.push_back(std::move(cell));
    }
    return report;
}

FlatMarginClass build_flat_margin_class(const PopulationTarget& target, const Matrix& sigma_star,
                                        const std::vector<double>& t_grid, int curve_points, std::uint64_t seed) {
    const int p = target.p();
    if (p < 2) throw ValidationError("the flat-margin construction needs p >= 2");
    if (sigma_star.rows() != p || sigma_star.cols() != p) throw ValidationError("sigma_star has the wrong dimension");
    if (!is_symmetric(sigma_star) || !is_positive_definite(sigma_star))
        throw ValidationError("sigma_star must be symmetric positive definite");
    if (t_grid.empty()) throw ValidationError("t grid must be nonempty");
    if (curve_points < 0) throw ValidationError("curve_points must be nonnegative");

    const Matrix grad = dq_matrix(sigma_star, target);
    const double gnorm = grad.norm();
    if (gnorm <= 1e-10 * std::max(1.0, sigma_star.norm()))
        throw ValidationError("DQ(sigma_star) vanishes: sigma_star equals the target covariance");

    FlatMarginClass out;
    out.corrector = -grad / gnorm;  // DQ[G] = -||DQ|| < 0
    out.bump = out.corrector;
    Rng rng = make_rng(seed, {0x666c6174ULL});
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix raw(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) raw(i, j) = gauss(rng);
    raw = symmetrize(raw);
    Matrix tangent = raw - (raw.cwiseProduct(grad).sum() / (gnorm * gnorm)) * grad;
    out.tangent = tangent / tangent.norm();

    std::vector<double> ts(t_grid.begin(), t_grid.end());
    ts.push_back(0.0);
    double delta = 0.0;
    for (double t : t_grid) delta = std::max(delta, std::abs(t));
    if (curve_points >= 2)
        for (int i = 0; i < curve_points; ++i) ts.push_back(-delta + 2.0 * delta * i / (curve_points - 1));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    const double q_star = population_q(sigma_star, target);
    std::vector<Matrix> members;
    for (double t : ts) {
        const Matrix base = sigma_star + t * out.tangent;
        auto level_gap = [&](double s) {
            const Matrix m = base + s * out.corrector;
            Eigen::LLT<Matrix> llt;
            double ld = 0.0;
            if (!try_spd_factor(m, llt, ld)) return -std::numeric_limits<double>::infinity();
            return -0.5 * (ld + llt.solve(target.cov).trace()) - q_star;
        };
        double s = 0.0;
        if (t != 0.0) {
            // level_gap decreases through its root near s = 0
            const double g0 = level_gap(0.0);
            double h = std::max(4.0 * std::abs(g0) / gnorm, 1e-12);
            double lo = -h, hi = h;
            int expand = 0;
            while (!(level_gap(lo) > 0.0 && level_gap(hi) < 0.0) && expand < 60) {
                h *= 2.0;
                lo = -h;
                hi = h;
                ++expand;
            }
            if (!(level_gap(lo) > 0.0 && level_gap(hi) < 0.0))
                throw NumericalError("level-curve root not bracketed at t = " + std::to_string(t));
            std::uintmax_t iters = 200;
            const auto [a, b] = boost::math::tools::toms748_solve(
                level_gap, lo, hi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
                iters);
            s = 0.5 * (a + b);
        }
        const Matrix zeta = base + s * out.corrector;
        const double residual = std::abs(population_q(zeta, target) - q_star);
        if (residual >= 1e-10) throw NumericalError("level-curve residual too large at t = " + std::to_string(t));
        const Matrix gamma = zeta + std::pow(t, 4) * out.bump;
        if (!is_positive_definite(gamma)) throw NumericalError("gamma(t) is not positive definite at t = " + std::to_string(t));
        out.t_values.push_back(t);
        out.level_residuals.push_back(residual);
        members.push_back(symmetrize(gamma));
    }
    out.spec = ModelSpec::explicit_set(std::move(members), 0);
    return out;
}

Interval clopper_pearson(int successes, int trials, double confidence) {
    if (trials < 1 || successes < 0 || successes > trials) throw ValidationError("invalid binomial counts");
    const double alpha = 1.0 - confidence;
    Interval iv;
    if (successes > 0) {
        boost::math::beta_distribution<double> lo_dist(successes, trials - successes + 1);
        iv.lo = boost::math::quantile(lo_dist, alpha / 2.0);
    }
    if (successes < trials) {
        boost::math::beta_distribution<double> hi_dist(successes + 1, trials - successes);
        iv.hi = boost::math::quantile(hi_dist, 1.0 - alpha / 2.0);
    }
    return iv;
}

}  // namespace covsel
