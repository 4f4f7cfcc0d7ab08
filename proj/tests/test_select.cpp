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
#include "covsel/select.hpp"
#include "covsel/simulate.hpp"

using namespace covsel;

namespace {

CandidateFamily dense_family(int p, int q_max) {
    CandidateFamily f;
    for (int q = 0; q <= q_max; ++q) {
        f.models.push_back(ModelSpec::dense(p, q, ErrorType::diagonal, {}));
        f.complexities.push_back(complexity(f.models.back(), ComplexityScheme::dense_gauge));
    }
    return f;
}

PenaltySystem flat_table(std::size_t m, double value) {
    return PenaltySystem::table_system({100}, std::vector<std::vector<double>>(m, std::vector<double>{value}));
}

DataLaw factor_law() {
    DataLaw law;
    Vector lam = Vector::Constant(4, 0.8);
    law.mean = Vector::Zero(4);
    law.cov = lam * lam.transpose() + Matrix::Identity(4, 4);
    return law;
}

const std::vector<ModelStatus> all_ok(std::size_t m) { return std::vector<ModelStatus>(m, ModelStatus::ok); }

}  // namespace

TEST_CASE("ties go to the smallest index") {
    const auto fam = dense_family(3, 2);
    const auto r = select_from_values(fam, {-10.0, -10.0, -12.0}, all_ok(3), 100, flat_table(3, 0.0));
    CHECK(r.selected_index == 0);
    CHECK(r.selected_order == 0);
    CHECK(r.runner_up_margin == 0.0);
    CHECK_FALSE(r.decisive(1e-6 * 100));
    const auto s = select_from_values(fam, {-12.0, -10.0, -10.0}, all_ok(3), 100, flat_table(3, 0.0));
    CHECK(s.selected_index == 1);
}

TEST_CASE("single model is always selected") {
    CandidateFamily one;
    one.models.push_back(ModelSpec::dense(3, 1, ErrorType::diagonal, {}));
    one.complexities = {6.0};
    for (auto k : {PenaltyKind::bic, PenaltyKind::aic, PenaltyKind::hq}) {
        const auto r = select_from_values(one, {-50.0}, all_ok(1), 100, PenaltySystem::named(k));
        CHECK(r.selected_index == 0);
        CHECK(std::isinf(r.runner_up_margin));
    }
}

TEST_CASE("score arithmetic and invariances") {
    const auto fam = dense_family(4, 3);
    const std::vector<double> t{-2900.0, -2640.0, -2635.0, -2634.0};
    const auto bic = select_from_values(fam, t, all_ok(4), 1000, PenaltySystem::named(PenaltyKind::bic));
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(bic.scores[k] == t[k] - 0.5 * fam.complexities[k] * std::log(1000.0));
    CHECK(bic.selected_index == 1);

    auto with_mean = PenaltySystem::named(PenaltyKind::bic);
    with_mean.mean_penalty_p = 4;
    const auto full = select_from_values(fam, t, all_ok(4), 1000, with_mean);
    CHECK(full.selected_index == bic.selected_index);
    CHECK(full.runner_up_margin == doctest::Approx(bic.runner_up_margin).epsilon(1e-12));

    const auto zero = select_from_values(fam, t, all_ok(4), 100, flat_table(4, 0.0));
    CHECK(zero.scores[static_cast<std::size_t>(zero.selected_index)] == *std::max_element(t.begin(), t.end()));
    const auto shifted = select_from_values(fam, t, all_ok(4), 100, flat_table(4, 7.5));
    CHECK(shifted.selected_index == zero.selected_index);
}

TEST_CASE("failed fits are excluded and recorded") {
    const auto fam = dense_family(3, 2);
    const std::vector<ModelStatus> st{ModelStatus::ok, ModelStatus::failed, ModelStatus::not_converged};
    const auto r = select_from_values(fam, {-12.0, -1.0, -11.0}, st, 100, flat_table(3, 0.0));
    CHECK(r.selected_index == 2);
    CHECK(r.reduced_set);
    CHECK(r.excluded == std::vector<int>{1});
    CHECK(r.statuses[2] == ModelStatus::not_converged);
    CHECK_THROWS_AS((void)select_from_values(fam, {-1.0, -1.0, -1.0},
                                             std::vector<ModelStatus>(3, ModelStatus::failed), 100, flat_table(3, 0.0)),
                    NumericalError);
}

TEST_CASE("penalty domain is checked before fitting") {
    const auto fam = dense_family(4, 1);
    SampleMoments m{20, Vector::Zero(4), Matrix::Identity(4, 4)};
    CHECK_THROWS_AS((void)select_model(fam, m, PenaltySystem::named(PenaltyKind::ssbic), {}), ValidationError);
}

TEST_CASE("BIC picks the true order on a large correct-spec sample") {
    const auto fam = dense_family(4, 3);
    const auto m = compute_moments(generate_data(factor_law(), 4000, 7));
    FitOptions opts;
    opts.seed = 7;
    const auto r = select_model(fam, m, PenaltySystem::named(PenaltyKind::bic), opts);
    CHECK(r.selected_order == 1);
    CHECK(r.reduced_set == false);
    const auto again = select_model(fam, m, PenaltySystem::named(PenaltyKind::bic), opts);
    CHECK(again.scores == r.scores);
    CHECK(again.runner_up_margin == r.runner_up_margin);
}
