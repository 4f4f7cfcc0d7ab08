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

#include "covsel/errors.hpp"
#include "covsel/fit.hpp"
#include "test_util.hpp"

using namespace covsel;
using covsel::testing::random_data;
using covsel::testing::random_spd;

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// argmax over psi in [lo, hi] of -log psi - s / psi
double box_oracle(double s, double lo, double hi) { return std::min(std::max(s, lo), hi); }

bool same_result(const FitResult& a, const FitResult& b) {
    if (a.t_value != b.t_value || a.best_start != b.best_start || a.starts_converged != b.starts_converged) return false;
    if (a.sigma != b.sigma) return false;
    for (std::size_t i = 0; i < a.start_outcomes.size(); ++i)
        if (a.start_outcomes[i].t_value != b.start_outcomes[i].t_value) return false;
    return true;
}

}  // namespace

TEST_CASE("q = 0 closed forms") {
    SampleMoments m{10, Vector::Zero(2), diag2(2.0, 0.5)};
    const auto diag = fit_class(ModelSpec::dense(2, 0, ErrorType::diagonal, {}), m, {});
    CHECK(diag.best_point->uniqueness(0) == doctest::Approx(2.0));
    CHECK(diag.best_point->uniqueness(1) == doctest::Approx(0.5));
    CHECK(diag.t_value == doctest::Approx(-10.0).epsilon(1e-14));

    SampleMoments big{10, Vector::Zero(2), diag2(5.0, 0.5)};
    CHECK(fit_class(ModelSpec::dense(2, 0, ErrorType::diagonal, {}), big, {}).best_point->uniqueness(0) == 4.0);

    const auto sph = fit_class(ModelSpec::dense(2, 0, ErrorType::spherical, {}), m, {});
    CHECK(sph.best_point->uniqueness.size() == 1);
    CHECK(sph.best_point->uniqueness(0) == doctest::Approx(1.25));

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 1 + trial % 4;
        const Matrix s = random_spd(p, rng, 0.05) * 2.0;
        SampleMoments mm{25, Vector::Zero(p), s};
        ClassBounds b;
        b.psi_min = 0.5;
        b.psi_max = 1.5;
        const auto r = fit_class(ModelSpec::dense(p, 0, ErrorType::diagonal, b), mm, {});
        for (int j = 0; j < p; ++j) CHECK(r.best_point->uniqueness(j) == doctest::Approx(box_oracle(s(j, j), 0.5, 1.5)));
        CHECK(r.t_value == doctest::Approx(profiled_loglik(r.sigma, mm)).epsilon(1e-14));
    }
}

TEST_CASE("explicit sets take the finite maximum") {
    SampleMoments m{10, Vector::Zero(1), Matrix::Constant(1, 1, 1.3)};
    const Matrix lo = Matrix::Constant(1, 1, 0.5), hi = Matrix::Constant(1, 1, 2.4607768);
    const auto r = fit_class(ModelSpec::explicit_set({lo, hi}, 0), m, {});
    CHECK(r.t_value == std::max(profiled_loglik(lo, m), profiled_loglik(hi, m)));
    CHECK_FALSE(r.best_point.has_value());
}

TEST_CASE("optimizer attains S when S lies in the class") {
    const auto spec = ModelSpec::dense(4, 1, ErrorType::diagonal, {});
    Vector lam = Vector::Constant(4, 0.8);
    const Matrix s = lam * lam.transpose() + Matrix::Identity(4, 4);
    SampleMoments m{500, Vector::Zero(4), s};
    const auto r = fit_class(spec, m, {});
    CHECK(r.t_value == doctest::Approx(-250.0 * (std::log(s.determinant()) + 4.0)).epsilon(1e-9));
    CHECK(r.status == FitStatus::converged);
    CHECK(r.gradient_norm_at_solution <= 1e-8 * 500);
    CHECK((construct_sigma(*r.best_point, spec) - r.sigma).norm() == 0.0);
    CHECK(r.t_value == profiled_loglik(r.sigma, m));
}

TEST_CASE("fits are feasible, reproducible and scheduling independent") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 6; ++trial) {
        const int p = 3 + trial % 3;
        const auto spec = ModelSpec::dense(p, 1 + trial % 2, trial % 2 ? ErrorType::spherical : ErrorType::diagonal, {});
        const auto m = compute_moments(random_data(80, p, rng));
        FitOptions opts;
        opts.seed = 100 + trial;
        const auto a = fit_class(spec, m, opts, 3);
        const auto b = fit_class(spec, m, opts, 3);
        const auto ref = fit_class_reference(spec, m, opts, 3);
        opts.threads = 4;
        const auto many = fit_class(spec, m, opts, 3);
        CHECK(same_result(a, b));
        CHECK(same_result(a, ref));
        CHECK(same_result(a, many));
        CHECK(point_violations(*a.best_point, spec).empty());
        CHECK(static_cast<int>(a.start_outcomes.size()) == opts.starts);
    }
}

TEST_CASE("nested classes are ordered") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        const int p = 4;
        const auto m = compute_moments(random_data(120, p, rng));
        double prev = -std::numeric_limits<double>::infinity();
        for (int q = 0; q <= 2; ++q) {
            const double t = fit_class(ModelSpec::dense(p, q, ErrorType::diagonal, {}), m, {}).t_value;
            CHECK(t >= prev - 1e-6 * m.n);
            prev = t;
        }
        const double sph = fit_class(ModelSpec::dense(p, 1, ErrorType::spherical, {}), m, {}).t_value;
        const double dia = fit_class(ModelSpec::dense(p, 1, ErrorType::diagonal, {}), m, {}).t_value;
        CHECK(dia >= sph - 1e-6 * m.n);
        const auto sparse = ModelSpec::factor(SupportPattern::from_entries(p, 1, {{0, 0}, {1, 0}}), ErrorType::diagonal, {});
        CHECK(dia >= fit_class(sparse, m, {}).t_value - 1e-6 * m.n);
    }
}

TEST_CASE("brute force is dominated by the optimizer") {
    std::mt19937_64 rng(34);
    const auto spec = ModelSpec::dense(2, 1, ErrorType::diagonal, {});
    for (int trial = 0; trial < 3; ++trial) {
        const auto m = compute_moments(random_data(60, 2, rng));
        const auto grid = brute_force_fit(spec, m, 16);
        const auto ref = brute_force_fit_reference(spec, m, 16);
        CHECK(grid.t_value == ref.t_value);
        CHECK(grid.sigma == ref.sigma);
        const auto opt = fit_class(spec, m, {});
        CHECK(opt.t_value >= grid.t_value - 1e-9);
        CHECK(std::abs(grid.t_value - opt.t_value) / m.n <= 0.05);
    }
    CHECK_THROWS_AS((void)brute_force_fit(ModelSpec::dense(4, 2, ErrorType::diagonal, {}),
                                          compute_moments(random_data(10, 4, rng)), 50),
                    ValidationError);
}

TEST_CASE("q = 0 grid refinement approaches the closed form") {
    SampleMoments m{10, Vector::Zero(2), diag2(2.0, 0.5)};
    const auto spec = ModelSpec::dense(2, 0, ErrorType::diagonal, {});
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int g : {10, 30, 100}) {
        const double gap = fit_class(spec, m, {}).t_value - brute_force_fit(spec, m, g).t_value;
        CHECK(gap >= -1e-12);
        CHECK(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.01);
}

TEST_CASE("projected gradient norm is zero at a box-clipped optimum") {
    SampleMoments m{10, Vector::Zero(2), diag2(5.0, 0.5)};
    const auto spec = ModelSpec::dense(2, 0, ErrorType::diagonal, {});
    const auto r = fit_class(spec, m, {});
    CHECK(projected_gradient_norm(*r.best_point, spec, m) < 1e-10);
    FactorPoint off = *r.best_point;
    off.uniqueness(1) = 1.0;
    CHECK(projected_gradient_norm(off, spec, m) > 0.1);
}

TEST_CASE("invalid inputs are rejected") {
    ClassBounds bad;
    bad.loading_radius = -1.0;
    SampleMoments m{10, Vector::Zero(2), Matrix::Identity(2, 2)};
    CHECK_THROWS_AS((void)fit_class(ModelSpec::dense(2, 1, ErrorType::diagonal, bad), m, {}), ValidationError);
    FitOptions zero;
    zero.starts = 0;
    CHECK_THROWS_AS((void)fit_class(ModelSpec::dense(2, 1, ErrorType::diagonal, {}), m, zero), ValidationError);
    SampleMoments wrong{10, Vector::Zero(3), Matrix::Identity(3, 3)};
    CHECK_THROWS_AS((void)fit_class(ModelSpec::dense(2, 1, ErrorType::diagonal, {}), wrong, {}), ValidationError);
}
