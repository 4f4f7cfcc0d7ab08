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

#include "covsel/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "covsel/errors.hpp"

namespace covsel {

PenaltySystem PenaltySystem::named(PenaltyKind kind) {
    if (kind == PenaltyKind::separable || kind == PenaltyKind::table)
        throw ValidationError("named() only builds the catalogue criteria");
    PenaltySystem s;
    s.kind = kind;
    return s;
}

PenaltySystem PenaltySystem::separable_system(Multiplier m, std::vector<double> scores, double alpha) {
    PenaltySystem s;
    s.kind = PenaltyKind::separable;
    s.multiplier = m;
    s.scores = std::move(scores);
    s.alpha = alpha;
    return s;
}

PenaltySystem PenaltySystem::table_system(std::vector<long> n_grid, std::vector<std::vector<double>> values) {
    PenaltySystem s;
    s.kind = PenaltyKind::table;
    s.n_grid = std::move(n_grid);
    s.values = std::move(values);
    return s;
}

std::string to_string(PenaltyKind k) {
    switch (k) {
        case PenaltyKind::bic: return "bic";
        case PenaltyKind::caic: return "caic";
        case PenaltyKind::hbic: return "hbic";
        case PenaltyKind::ssbic: return "ssbic";
        case PenaltyKind::hq: return "hq";
        case PenaltyKind::aic: return "aic";
        case PenaltyKind::separable: return "separable";
        case PenaltyKind::table: return "table";
    }
    return "unknown";
}

std::string to_string(Multiplier m) {
    switch (m) {
        case Multiplier::log_n_pow_alpha: return "log_n_pow_alpha";
        case Multiplier::constant: return "constant";
        case Multiplier::log_log_n: return "log_log_n";
        case Multiplier::sqrt_n_log_n: return "sqrt_n_log_n";
    }
    return "unknown";
}

PenaltyKind penalty_kind_from_string(const std::string& s) {
    for (auto k : {PenaltyKind::bic, PenaltyKind::caic, PenaltyKind::hbic, PenaltyKind::ssbic, PenaltyKind::hq,
                   PenaltyKind::aic, PenaltyKind::separable, PenaltyKind::table})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown penalty kind '" + s + "'");
}

Multiplier multiplier_from_string(const std::string& s) {
    for (auto m : {Multiplier::log_n_pow_alpha, Multiplier::constant, Multiplier::log_log_n, Multiplier::sqrt_n_log_n})
        if (to_string(m) == s) return m;
    throw ValidationError("unknown multiplier '" + s + "'");
}

std::string PenaltySystem::name() const {
    std::string base = to_string(kind);
    if (kind == PenaltyKind::separable) {
        base += ":" + to_string(multiplier);
        if (multiplier == Multiplier::log_n_pow_alpha) {
            std::ostringstream os;
            os << alpha;
            base += "^" + os.str();
        }
    }
    if (mean_penalty_p > 0) base += "+mean";
    return base;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::boundary: return "boundary";
    }
    return "unknown";
}

namespace {

double multiplier_value(const PenaltySystem& s, long n) {
    const double ln = std::log(static_cast<double>(n));
    switch (s.multiplier) {
        case Multiplier::log_n_pow_alpha: return std::pow(ln, s.alpha);
        case Multiplier::constant: return s.constant_value;
        case Multiplier::log_log_n: return std::log(ln);
        case Multiplier::sqrt_n_log_n: return std::sqrt(static_cast<double>(n)) * ln;
    }
    return 0.0;
}

double mean_penalty(const PenaltySystem& s, long n) {
    return s.mean_penalty_p > 0 ? 0.5 * s.mean_penalty_p * std::log(static_cast<double>(n)) : 0.0;
}

void check_domain(const PenaltySystem& s, long n) {
    if (n < 2) throw ValidationError("penalties need n >= 2");
    if (s.kind == PenaltyKind::ssbic && n <= 22) throw ValidationError("ssbic is defined for n > 22");
    if (s.kind == PenaltyKind::separable && s.multiplier == Multiplier::log_n_pow_alpha && !(s.alpha > 0.0))
        throw ValidationError("log_n_pow_alpha needs alpha > 0");
}

std::size_t table_column(const PenaltySystem& s, long n) {
    const auto it = std::find(s.n_grid.begin(), s.n_grid.end(), n);
    if (it == s.n_grid.end()) throw ValidationError("table penalty has no entry for n = " + std::to_string(n));
    return static_cast<std::size_t>(it - s.n_grid.begin());
}

// How a_{k,n} scales with n, for symbolic classification.
enum class Growth { logarithmic, log_log, constant, sqrt_n_log_n };

Growth growth_of(const PenaltySystem& s) {
    switch (s.kind) {
        case PenaltyKind::bic:
        case PenaltyKind::caic:
        case PenaltyKind::hbic:
        case PenaltyKind::ssbic: return Growth::logarithmic;
        case PenaltyKind::hq: return Growth::log_log;
        case PenaltyKind::aic: return Growth::constant;
        default: break;
    }
    switch (s.multiplier) {
        case Multiplier::log_n_pow_alpha: return Growth::logarithmic;
        case Multiplier::log_log_n: return Growth::log_log;
        case Multiplier::constant: return Growth::constant;
        case Multiplier::sqrt_n_log_n: return Growth::sqrt_n_log_n;
    }
    return Growth::constant;
}

Verdict worse(Verdict a, Verdict b) {
    auto rank = [](Verdict v) { return v == Verdict::pass ? 0 : v == Verdict::boundary ? 1 : 2; };
    return rank(a) >= rank(b) ? a : b;
}


}  // namespace

double penalty_value(const PenaltySystem& system, double d, long n) {
    check_domain(system, n);
    const double nn = static_cast<double>(n);
    const double ln = std::log(nn);
    double a = 0.0;
    switch (system.kind) {
        case PenaltyKind::bic: a = 0.5 * d * ln; break;
        case PenaltyKind::caic: a = 0.5 * d * (ln + 1.0); break;
        case PenaltyKind::hbic: a = 0.5 * d * std::log(nn / (2.0 * std::numbers::pi)); break;
        case PenaltyKind::ssbic: a = 0.5 * d * std::log((nn + 2.0) / 24.0); break;
        case PenaltyKind::hq: a = d * std::log(ln); break;
        case PenaltyKind::aic: a = d; break;
        case PenaltyKind::separable: a = multiplier_value(system, n) * d; break;
        case PenaltyKind::table: throw ValidationError("table penalties are looked up per model; use family_penalties");
    }
    return a + mean_penalty(system, n);
}

std::vector<double> family_penalties(const PenaltySystem& system, const std::vector<double>& complexities, long n) {
    const std::size_t m = complexities.size();
    std::vector<double> out(m);
    if (system.kind == PenaltyKind::table) {
        check_domain(system, n);
        if (system.values.size() != m) throw ValidationError("table penalty has the wrong number of models");
        const std::size_t col = table_column(system, n);
        for (std::size_t k = 0; k < m; ++k) {
            if (system.values[k].size() != system.n_grid.size())
                throw ValidationError("table penalty row length does not match its n grid");
            out[k] = system.values[k][col] + mean_penalty(system, n);
        }
        return out;
    }
    const bool use_scores = system.kind == PenaltyKind::separable && !system.scores.empty();
    if (use_scores && system.scores.size() != m) throw ValidationError("separable scores do not match the family size");
    for (std::size_t k = 0; k < m; ++k) out[k] = penalty_value(system, use_scores ? system.scores[k] : complexities[k], n);
    return out;
}

PenaltyClassification classify_penalty(const PenaltySystem& system, const CandidateFamily& family,
                                       const OrderStructure& order, const std::vector<long>& n_probe_grid) {
    PenaltyClassification c;
    const std::size_t m = family.models.size();
    if (order.k_zero.empty()) throw ValidationError("classification needs a nonempty set of minimal-order optimal models");
    for (int k : order.k_star)
        if (k < 0 || static_cast<std::size_t>(k) >= m) throw ValidationError("optimal-model index out of range");
    if (order.hypothesized) c.notes.emplace_back("conditional on a hypothesized optimal set and pseudo-true order");

    std::vector<int> overfit;
    for (int k : order.k_star)
        if (family.models[static_cast<std::size_t>(k)].order() > order.q_star) overfit.push_back(k);

    if (system.kind != PenaltyKind::table) {
        const bool use_scores = system.kind == PenaltyKind::separable && !system.scores.empty();
        if (use_scores && system.scores.size() != m) throw ValidationError("separable scores do not match the family size");
        auto score = [&](int k) {
            const auto i = static_cast<std::size_t>(k);
            return use_scores ? system.scores[i] : family.complexities[i];
        };
        for (std::size_t k = 0; k < m; ++k)
            if (!(score(static_cast<int>(k)) > 0.0)) throw ValidationError("penalty scores must be positive");
        if (system.kind == PenaltyKind::separable && system.multiplier == Multiplier::log_n_pow_alpha &&
            !(system.alpha > 0.0))
            throw ValidationError("log_n_pow_alpha needs alpha > 0");

        const Growth growth = growth_of(system);
        c.p1 = Verdict::pass;  // every supported multiplier is o(n)
        double c_star = score(order.k_zero.front());
        for (int k : order.k_zero) c_star = std::min(c_star, score(k));

        if (overfit.empty()) {
            c.notes.emplace_back("no exact overfits: P2 and P3 hold vacuously");
        }
        for (int k : overfit) {
            const double gap = score(k) - c_star;
            Verdict p2 = Verdict::pass, p3 = Verdict::pass;
            if (!(gap > 0.0)) {
                p2 = p3 = Verdict::fail;
                c.notes.push_back("model " + std::to_string(k) + ": score gap to the minimal-order optimum is not positive");
            } else if (growth == Growth::constant) {
                p2 = p3 = Verdict::fail;
            } else if (growth == Growth::log_log) {
                p3 = Verdict::boundary;
            }
            c.p2 = worse(c.p2, p2);
            c.p3 = worse(c.p3, p3);
        }
        if (growth == Growth::constant) c.notes.emplace_back("constant penalty gaps do not diverge");
        if (growth == Growth::log_log && !overfit.empty())
            c.notes.emplace_back("log log n / gap tends to a nonzero constant: boundary of the admissible region");
        if (growth == Growth::logarithmic && system.kind == PenaltyKind::separable && system.alpha < 0.5 && !overfit.empty())
            c.notes.emplace_back("near-boundary: (log n)^alpha with small alpha dominates log log n only slowly");
        if (!n_probe_grid.empty() && !overfit.empty()) {
            const long n = *std::max_element(n_probe_grid.begin(), n_probe_grid.end());
            const auto a = family_penalties(system, family.complexities, n);
            double a_star = a[static_cast<std::size_t>(order.k_zero.front())];
            for (int k : order.k_zero) a_star = std::min(a_star, a[static_cast<std::size_t>(k)]);
            for (int k : overfit) {
                std::ostringstream os;
                os << "model " << k << ": gap at n=" << n << " is " << a[static_cast<std::size_t>(k)] - a_star;
                c.notes.push_back(os.str());
            }
        }
    } else {
        std::vector<long> grid = n_probe_grid.empty() ? system.n_grid : n_probe_grid;
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        if (grid.size() < 3 || grid.front() < 3) throw ValidationError("table classification needs at least 3 grid points with n >= 3");
        std::vector<std::vector<double>> a;
        for (long n : grid) a.push_back(family_penalties(system, family.complexities, n));

        // P1: a/n decreasing along the grid and small at its end.
        constexpr double p1_threshold = 0.05;
        c.p1 = Verdict::pass;
        for (std::size_t k = 0; k < m; ++k) {
            const double first = a.front()[k] / static_cast<double>(grid.front());
            const double last = a.back()[k] / static_cast<double>(grid.back());
            if (!(std::abs(last) < std::abs(first) && std::abs(last) < p1_threshold)) c.p1 = Verdict::fail;
        }
        if (overfit.empty()) c.notes.emplace_back("no exact overfits: P2 and P3 hold vacuously");
        for (int k : overfit) {
            std::vector<double> gap(grid.size()), ratio(grid.size());
            bool positive = true, increasing = true, ratio_decreasing = true;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double a_star = a[i][static_cast<std::size_t>(order.k_zero.front())];
                for (int j : order.k_zero) a_star = std::min(a_star, a[i][static_cast<std::size_t>(j)]);
                gap[i] = a[i][static_cast<std::size_t>(k)] - a_star;
                positive = positive && gap[i] > 0.0;
                ratio[i] = std::log(std::log(static_cast<double>(grid[i]))) / gap[i];
                if (i > 0) {
                    increasing = increasing && gap[i] > gap[i - 1];
                    ratio_decreasing = ratio_decreasing && ratio[i] < ratio[i - 1];
                }
            }
            const Verdict p2 = (positive && increasing) ? Verdict::pass : Verdict::fail;
            Verdict p3 = Verdict::fail;
            if (positive) {
                const double rho = ratio.back() / ratio.front();
                if (std::abs(rho - 1.0) <= 0.1) p3 = Verdict::boundary;
                else if (ratio_decreasing && rho < 0.9) {
                    p3 = Verdict::pass;
                    if (rho > 0.5) c.notes.push_back("model " + std::to_string(k) + ": near-boundary decay of log log n / gap");
                }
            }
            c.p2 = worse(c.p2, p2);
            c.p3 = worse(c.p3, p3);
        }
        c.notes.emplace_back("table system classified numerically on its n grid");
    }
    c.admissible = c.p1 == Verdict::pass && c.p2 == Verdict::pass && c.p3 == Verdict::pass;
    return c;
}

}  // namespace covsel
