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

#include <doctest.h>

#include <algorithm>

#include "covsel/errors.hpp"
#include "covsel/simulate.hpp"

using namespace covsel;

namespace {

DataLaw factor_law() {
    DataLaw law;
    Vector lam = Vector::Constant(4, 0.8);
    law.mean = Vector::Zero(4);
    law.cov = lam * lam.transpose() + Matrix::Identity(4, 4);
    return law;
}

CandidateFamily dense_family(int p, int q_max) {
    CandidateFamily f;
    for (int q = 0; q <= q_max; ++q) {
        f.models.push_back(ModelSpec::dense(p, q, ErrorType::diagonal, {}));
        f.complexities.push_back(complexity(f.models.back(), ComplexityScheme::dense_gauge));
    }
    return f;
}

MonteCarloPlan small_plan(std::vector<long> grid) {
    MonteCarloPlan plan;
    plan.n_grid = std::move(grid);
    plan.replications = 6;
    plan.seed = 99;
    plan.law = factor_law();
    plan.family = dense_family(4, 2);
    plan.systems = {PenaltySystem::named(PenaltyKind::bic), PenaltySystem::named(PenaltyKind::aic)};
    return plan;
}

bool same_cells(const McCell& a, const McCell& b) {
    return a.system == b.system && a.n == b.n && a.order_frequency == b.order_frequency &&
           a.model_frequency == b.model_frequency && a.mean_margin == b.mean_margin &&
           a.median_margin == b.median_margin && a.selected_orders == b.selected_orders;
}

// Fixed point s = exp(c - 1/s); the map contracts with slope 1/s on (1, inf).
double fixed_point_sigma_plus(double lo) {
    const double c = std::log(lo) + 1.0 / lo;
    double s = std::exp(c);
    for (int i = 0; i < 100000; ++i) s = std::exp(c - 1.0 / s);
    return s;
}

}  // namespace

TEST_CASE("generated samples concentrate around the law") {
    DataLaw g;
    g.mean = Vector::Zero(2);
    g.cov = Matrix::Identity(2, 2);
    CHECK((compute_moments(generate_data(g, 100000, 1)).cov - g.cov).norm() < 0.03);

    DataLaw t = factor_law();
    t.kind = LawKind::student_t;
    t.dof = 8.0;
    CHECK((compute_moments(generate_data(t, 100000, 2)).cov - t.cov).norm() < 0.05);

    DataLaw mix = factor_law();
    mix.kind = LawKind::scale_mixture;
    mix.mean = Vector::Constant(4, 3.0);
    const auto mm = compute_moments(generate_data(mix, 100000, 3));
    CHECK((mm.cov - mix.cov).norm() < 0.08);
    CHECK((mm.mean - mix.mean).norm() < 0.05);
}

TEST_CASE("generation is deterministic and prefix-stable") {
    const DataLaw law = factor_law();
    const Matrix a = generate_data(law, 200, 5);
    CHECK(a == generate_data(law, 200, 5));
    CHECK(a.topRows(50) == generate_data(law, 50, 5));
    CHECK(a != generate_data(law, 200, 6));
    DataLaw heavy = law;
    heavy.kind = LawKind::student_t;
    heavy.dof = 4.0;
    CHECK_THROWS_AS((void)generate_data(heavy, 10, 1), ValidationError);
    CHECK_THROWS_AS((void)generate_data(law, 0, 1), ValidationError);
}

TEST_CASE("moment concentration envelope") {
    DataLaw g;
    g.mean = Vector::Zero(2);
    g.cov = Matrix::Identity(2, 2);
    for (long n : {500L, 5000L}) {
        std::vector<double> err;
        for (int r = 0; r < 200; ++r)
            err.push_back((compute_moments(generate_data(g, n, cell_seed(17, r, n))).cov - g.cov).norm());
        std::sort(err.begin(), err.end());
        const double q99 = err[static_cast<std::size_t>(0.99 * (err.size() - 1))];
        const double ln = std::log(static_cast<double>(n));
        CHECK(q99 <= 8.0 * std::sqrt(std::log(ln) / static_cast<double>(n)));
    }
}

TEST_CASE("Monte Carlo cells partition the replications") {
    const auto plan = small_plan({60, 240});
    FitOptions opts;
    opts.starts = 3;
    const auto r = run_monte_carlo(plan, opts);
    REQUIRE(r.cells.size() == 4);
    for (const auto& c : r.cells) {
        double total = 0.0, total_models = 0.0;
        for (const auto& [q, f] : c.order_frequency) total += f;
        for (double f : c.model_frequency) total_models += f;
        CHECK(std::abs(total - 1.0) <= 1e-12);
        CHECK(std::abs(total_models - 1.0) <= 1e-12);
        CHECK(c.selected_orders.size() == 6);
        CHECK(c.decisive_fraction >= 0.0);
        CHECK(c.decisive_fraction <= 1.0);
    }
    CHECK(r.replication_seeds.size() == 6);
    CHECK(r.replication_seeds[2][1] == cell_seed(99, 2, 240));
    CHECK(r.cell("aic", 240).system == "aic");
    CHECK_THROWS_AS((void)r.cell("hq", 240), ValidationError);
}

TEST_CASE("Monte Carlo reports do not depend on scheduling or grid growth") {
    FitOptions opts;
    opts.starts = 3;
    const auto plan = small_plan({60, 240});
    const auto serial = run_monte_carlo_reference(plan, opts);
    FitOptions many = opts;
    many.threads = 8;
    const auto parallel = run_monte_carlo(plan, many);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) CHECK(same_cells(serial.cells[i], parallel.cells[i]));

    const auto longer = run_monte_carlo(small_plan({60, 240, 480}), opts);
    CHECK(same_cells(longer.cell("bic", 60), serial.cell("bic", 60)));
    CHECK(same_cells(longer.cell("aic", 240), serial.cell("aic", 240)));
}

TEST_CASE("invalid plans are rejected") {
    FitOptions opts;
    auto plan = small_plan({100, 50});
    CHECK_THROWS_AS((void)run_monte_carlo(plan, opts), ValidationError);
    plan = small_plan({100});
    plan.replications = 0;
    CHECK_THROWS_AS((void)run_monte_carlo(plan, opts), ValidationError);
    plan = small_plan({10, 100});
    plan.systems = {PenaltySystem::named(PenaltyKind::ssbic)};
    CHECK_THROWS_AS((void)run_monte_carlo(plan, opts), ValidationError);
}

TEST_CASE("sigma_plus") {
    CHECK(sigma_plus(0.5) == doctest::Approx(2.4608).epsilon(1e-3 / 2.4608));
    CHECK(sigma_plus(0.2) == doctest::Approx(28.66).epsilon(0.05 / 28.66));
    for (double lo : {0.05, 0.2, 0.5, 0.8})
        CHECK(std::abs(sigma_plus(lo) - fixed_point_sigma_plus(lo)) < 1e-9 * fixed_point_sigma_plus(lo));
    double prev = sigma_plus(0.9);
    for (double lo : {0.99, 0.999, 0.9999}) {
        const double s = sigma_plus(lo);
        CHECK(s > 1.0);
        CHECK(s < prev);
        prev = s;
    }
    CHECK(prev < 1.001);
    CHECK_THROWS_AS((void)sigma_plus(1.0), ValidationError);
    CHECK_THROWS_AS((void)sigma_plus(0.0), ValidationError);
}

TEST_CASE("two-point pathology bookkeeping") {
    const auto r = pathology_two_point(0.5, {100, 1000}, 40, 3, {PenaltySystem::named(PenaltyKind::bic)});
    CHECK(r.sigma_plus == sigma_plus(0.5));
    CHECK(r.predicted_sd_over_sqrt_n == doctest::Approx(1.127).epsilon(1e-3));
    for (const auto& c : r.cells) {
        CHECK(c.max_identity_error < 1e-8);
        const auto& f = c.selection_frequency.at("bic");
        CHECK(f[0] + f[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.contrasts.size() == 40);
    }
    const auto again = pathology_two_point(0.5, {100, 1000}, 40, 3, {PenaltySystem::named(PenaltyKind::bic)});
    CHECK(again.cells[1].contrasts == r.cells[1].contrasts);
}

TEST_CASE("overfit gain trace") {
    FitOptions opts;
    opts.starts = 4;
    const auto fam = dense_family(4, 2);
    const auto tr = overfit_gain_trace(fam, factor_law(), 2, {200, 800}, 8, 5, opts);
    CHECK(tr.benchmark_exact);
    for (const auto& pt : tr.points) {
        for (double v : pt.values) CHECK(v >= -1e-6 * pt.n);
        CHECK(pt.median >= 0.0);
        CHECK(pt.q10 <= pt.median);
        CHECK(pt.median <= pt.q90);
    }
    CHECK(tr.median_over_log_n.size() == 2);
    CHECK_THROWS_AS((void)overfit_gain_trace(fam, factor_law(), 1, {200}, 2, 5, opts), ValidationError);
    CHECK_THROWS_AS((void)overfit_gain_trace(fam, factor_law(), 0, {200}, 2, 5, opts), ValidationError);
}

TEST_CASE("suboptimal loss trace") {
    FitOptions opts;
    opts.starts = 4;
    const auto fam = dense_family(4, 2);
    const auto tr = suboptimal_loss_trace(fam, factor_law(), 0, {200, 2000}, 8, 6, opts);
    CHECK(tr.population_limit < 0.0);
    for (const auto& pt : tr.points) CHECK(pt.mean < 0.0);
    CHECK(std::abs(tr.points.back().mean - tr.population_limit) < 0.25 * std::abs(tr.population_limit));
    CHECK_THROWS_AS((void)suboptimal_loss_trace(fam, factor_law(), 1, {200}, 2, 5, opts), ValidationError);
}

TEST_CASE("flat-margin class") {
    PopulationTarget t{Vector::Zero(3), Matrix::Identity(3, 3)};
    Matrix star = Matrix::Identity(3, 3);
    star(0, 1) = star(1, 0) = 0.3;
    star(2, 2) = 1.4;
    const auto fc = build_flat_margin_class(t, star, {-0.2, -0.1, -0.05, 0.05, 0.1, 0.2}, 5, 9);
    CHECK(std::find(fc.t_values.begin(), fc.t_values.end(), 0.0) != fc.t_values.end());
    CHECK(std::is_sorted(fc.t_values.begin(), fc.t_values.end()));
    CHECK(fc.spec.matrices.size() == fc.t_values.size());
    for (double r : fc.level_residuals) CHECK(r < 1e-10);
    const Matrix grad = dq_matrix(star, t);
    CHECK(std::abs(grad.cwiseProduct(fc.tangent).sum()) < 1e-12);
    CHECK(grad.cwiseProduct(fc.corrector).sum() < 0.0);
    for (const auto& m : fc.spec.matrices) CHECK(is_positive_definite(m));

    // V_class - Q(gamma(t)) decays like the fourth power of the distance
    const double v_class = population_q(star, t);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < fc.t_values.size(); ++i) {
        const double tt = fc.t_values[i];
        if (tt != 0.05 && tt != 0.1 && tt != 0.2) continue;
        const Matrix& g = fc.spec.matrices[i];
        x.push_back(std::log((g - star).norm()));
        y.push_back(std::log(v_class - population_q(g, t)));
    }
    REQUIRE(x.size() == 3);
    const double slope = least_squares_line(x, y).slope;
    CHECK(slope >= 3.5);
    CHECK(slope <= 4.5);

    CHECK_THROWS_AS((void)build_flat_margin_class(t, t.cov, {0.1}, 0), ValidationError);
    PopulationTarget one{Vector::Zero(1), Matrix::Identity(1, 1)};
    CHECK_THROWS_AS((void)build_flat_margin_class(one, 2.0 * one.cov, {0.1}, 0), ValidationError);
}

TEST_CASE("Clopper-Pearson intervals") {
    const auto none = clopper_pearson(0, 10, 0.95);
    CHECK(none.lo == 0.0);
    CHECK(none.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
    const auto all = clopper_pearson(10, 10, 0.95);
    CHECK(all.hi == 1.0);
    CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-10));
    const auto half = clopper_pearson(5, 10, 0.95);
    CHECK(half.lo == doctest::Approx(0.187086).epsilon(1e-5));
    CHECK(half.hi == doctest::Approx(0.812914).epsilon(1e-5));
    CHECK_THROWS_AS((void)clopper_pearson(11, 10, 0.95), ValidationError);
}
