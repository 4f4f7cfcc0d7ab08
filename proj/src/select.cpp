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

#include "covsel/select.hpp"

#include <cmath>
#include <limits>

#include "covsel/errors.hpp"

namespace covsel {

std::string to_string(ModelStatus s) {
    switch (s) {
        case ModelStatus::ok: return "ok";
        case ModelStatus::not_converged: return "not_converged";
        case ModelStatus::failed: return "failed";
    }
    return "unknown";
}

SelectionReport select_from_values(const CandidateFamily& family, const std::vector<double>& t_values,
                                   const std::vector<ModelStatus>& statuses, long n, const PenaltySystem& system) {
    const std::size_t m = family.models.size();
    if (t_values.size() != m || statuses.size() != m) throw ValidationError("one value and status per model is required");
    SelectionReport r;
    r.penalty = system.name();
    r.n = n;
    r.t_values = t_values;
    r.statuses = statuses;
    r.penalties_applied = family_penalties(system, family.complexities, n);
    r.scores.resize(m);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        r.scores[k] = t_values[k] - r.penalties_applied[k];
        if (statuses[k] == ModelStatus::failed || !std::isfinite(r.scores[k])) {
            r.excluded.push_back(static_cast<int>(k));
            continue;
        }
        if (r.selected_index < 0 || r.scores[k] > best) {
            best = r.scores[k];
            r.selected_index = static_cast<int>(k);
        }
    }
    r.reduced_set = !r.excluded.empty();
    if (r.selected_index < 0) throw NumericalError("every model fit failed; nothing to select");
    r.selected_order = family.models[static_cast<std::size_t>(r.selected_index)].order();
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        if (static_cast<int>(k) == r.selected_index || statuses[k] == ModelStatus::failed || !std::isfinite(r.scores[k]))
            continue;
        second = std::max(second, r.scores[k]);
    }
    r.runner_up_margin = best - second;
    return r;
}

SelectionReport select_from_fits(const CandidateFamily& family, const std::vector<FitResult>& fits, long n,
                                 const PenaltySystem& system) {
    std::vector<double> t(fits.size());
    std::vector<ModelStatus> st(fits.size());
    for (std::size_t k = 0; k < fits.size(); ++k) {
        t[k] = fits[k].t_value;
        switch (fits[k].status) {
            case FitStatus::converged: st[k] = ModelStatus::ok; break;
            case FitStatus::max_iters_reached: st[k] = ModelStatus::not_converged; break;
            case FitStatus::all_diverged: st[k] = ModelStatus::failed; break;
        }
    }
    return select_from_values(family, t, st, n, system);
}

std::vector<FitResult> fit_family(const CandidateFamily& family, const SampleMoments& moments, const FitOptions& opts) {
    require_valid(family);
    const auto m = static_cast<int>(family.models.size());
    std::vector<FitResult> fits(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        fits[static_cast<std::size_t>(k)] =
            fit_class(family.models[static_cast<std::size_t>(k)], moments, opts, static_cast<std::uint64_t>(k));
    }
    return fits;
}

SelectionReport select_model(const CandidateFamily& family, const SampleMoments& moments, const PenaltySystem& system,
                             const FitOptions& opts) {
    // validate the penalty domain before spending time on fits
    (void)family_penalties(system, family.complexities, moments.n);
    return select_from_fits(family, fit_family(family, moments, opts), moments.n, system);
}

}  // namespace covsel
