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

#include "covsel/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "covsel/errors.hpp"

namespace covsel::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ValidationError(where + ": " + what); }

const Json& require(const Json& j, const std::string& where, const char* key) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where + "." + key, "missing required field");
    return *it;
}

double as_number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

long as_integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<long>();
}

std::string as_string(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

double number_or(const Json& j, const std::string& where, const char* key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : as_number(*it, where + "." + key);
}

Vector parse_vector(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

// Nested rows, or a flat row-major list of p*p numbers when p is known.
Matrix parse_matrix(const Json& j, const std::string& where, int p = -1) {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array");
    if (j.front().is_array()) {
        const auto rows = static_cast<Eigen::Index>(j.size());
        const auto cols = static_cast<Eigen::Index>(j.front().size());
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const auto& row = j[static_cast<std::size_t>(r)];
            const std::string rw = where + "[" + std::to_string(r) + "]";
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail(rw, "rows must have equal length");
            for (Eigen::Index c = 0; c < cols; ++c)
                m(r, c) = as_number(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
        }
        return m;
    }
    if (p < 1 || j.size() != static_cast<std::size_t>(p) * p)
        fail(where, "flat matrices need exactly p*p row-major entries");
    Matrix m(p, p);
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c)
            m(r, c) = as_number(j[static_cast<std::size_t>(r * p + c)], where + "[" + std::to_string(r * p + c) + "]");
    return m;
}

std::string joined(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
}

struct ParsedModel {
    ModelSpec spec;
    std::optional<double> fixed;
    ComplexityScheme scheme = ComplexityScheme::dense_gauge;
};

ParsedModel parse_model(const Json& m, int p, const std::string& where) {
    if (!m.is_object()) fail(where, "expected an object");
    ParsedModel out;
    const std::string kind = m.contains("kind") ? as_string(m["kind"], where + ".kind") : "factor_class";
    if (kind == "factor_class") {
        const long q = as_integer(require(m, where, "q"), where + ".q");
        if (q < 0) fail(where + ".q", "must be nonnegative");
        ErrorType err = ErrorType::diagonal;
        if (m.contains("error")) {
            const std::string e = as_string(m["error"], where + ".error");
            if (e == "diag") err = ErrorType::diagonal;
            else if (e == "sph") err = ErrorType::spherical;
            else fail(where + ".error", "expected \"diag\" or \"sph\"");
        }
        ClassBounds b;
        if (m.contains("bounds")) {
            const Json& bj = m["bounds"];
            const std::string bw = where + ".bounds";
            if (!bj.is_object()) fail(bw, "expected an object");
            b.psi_min = number_or(bj, bw, "psi_min", b.psi_min);
            b.psi_max = number_or(bj, bw, "psi_max", b.psi_max);
            b.loading_radius = number_or(bj, bw, "M", b.loading_radius);
        }
        SupportPattern pattern = SupportPattern::full(p, static_cast<int>(q));
        if (m.contains("pattern")) {
            const Json& pj = m["pattern"];
            const std::string pw = where + ".pattern";
            if (pj.is_string()) {
                if (pj.get<std::string>() != "full") fail(pw, "expected \"full\" or a list of [row, col] pairs");
            } else if (pj.is_array()) {
                std::vector<std::pair<int, int>> entries;
                for (std::size_t i = 0; i < pj.size(); ++i) {
                    const std::string ew = pw + "[" + std::to_string(i) + "]";
                    if (!pj[i].is_array() || pj[i].size() != 2) fail(ew, "expected a [row, col] pair");
                    entries.emplace_back(static_cast<int>(as_integer(pj[i][0], ew + "[0]")),
                                         static_cast<int>(as_integer(pj[i][1], ew + "[1]")));
                }
                pattern = SupportPattern::from_entries(p, static_cast<int>(q), std::move(entries));
            } else {
                fail(pw, "expected \"full\" or a list of [row, col] pairs");
            }
        }
        out.spec = ModelSpec::factor(std::move(pattern), err, b);
    } else if (kind == "explicit_set") {
        const Json& mats = require(m, where, "matrices");
        if (!mats.is_array() || mats.empty()) fail(where + ".matrices", "expected a nonempty array of matrices");
        std::vector<Matrix> ms;
        for (std::size_t i = 0; i < mats.size(); ++i)
            ms.push_back(parse_matrix(mats[i], where + ".matrices[" + std::to_string(i) + "]", p));
        const int order = m.contains("nominal_order")
                              ? static_cast<int>(as_integer(m["nominal_order"], where + ".nominal_order"))
                              : 0;
        out.spec = ModelSpec::explicit_set(std::move(ms), order);
    } else {
        fail(where + ".kind", "expected \"factor_class\" or \"explicit_set\"");
    }

    if (m.contains("complexity_scheme")) {
        const Json& cs = m["complexity_scheme"];
        const std::string cw = where + ".complexity_scheme";
        if (cs.is_object()) {
            out.fixed = as_number(require(cs, cw, "fixed"), cw + ".fixed");
        } else {
            const std::string s = as_string(cs, cw);
            if (s == "dense_gauge") out.scheme = ComplexityScheme::dense_gauge;
            else if (s == "raw_support") out.scheme = ComplexityScheme::raw_support;
            else if (s == "jacobian_rank") out.scheme = ComplexityScheme::jacobian_rank;
            else fail(cw, "expected dense_gauge, raw_support, jacobian_rank or {\"fixed\": d}");
        }
    }
    if (out.spec.kind == ModelKind::explicit_set && !out.fixed)
        fail(where + ".complexity_scheme", "explicit_set models need {\"fixed\": d}");
    return out;
}

Json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json point_json(const std::optional<FactorPoint>& pt) {
    if (!pt) return nullptr;
    return Json{{"loadings", to_json(pt->loadings)}, {"uniqueness", vec_json(pt->uniqueness)}};
}

Json verdict_json(Verdict v) { return to_string(v); }

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path + ": cannot write file");
    out << text;
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

FamilyDocument parse_family(const Json& j) {
    if (!j.is_object()) fail("family", "expected an object");
    const long p = as_integer(require(j, "family", "p"), "p");
    if (p < 1) fail("p", "must be positive");
    const Json& models = require(j, "family", "models");
    if (!models.is_array() || models.empty()) fail("models", "expected a nonempty array");
    FamilyDocument doc;
    for (std::size_t k = 0; k < models.size(); ++k) {
        const std::string where = "models[" + std::to_string(k) + "]";
        ParsedModel pm = parse_model(models[k], static_cast<int>(p), where);
        if (auto v = validate_spec(pm.spec); !v.empty()) throw ValidationError(where + ": " + joined(v));
        if (pm.spec.p() != p)
            fail(where, "dimension mismatch (p = " + std::to_string(pm.spec.p()) + ", expected " + std::to_string(p) + ")");
        const double d = pm.fixed ? *pm.fixed : complexity(pm.spec, pm.scheme, k);
        doc.family.models.push_back(std::move(pm.spec));
        doc.family.complexities.push_back(d);
    }
    require_valid(doc.family);
    if (j.contains("penalty")) doc.penalty = parse_penalty(j["penalty"], "penalty");
    if (j.contains("target")) doc.target = parse_target(j["target"], "target");
    return doc;
}

Json family_to_json(const CandidateFamily& family) {
    Json models = Json::array();
    for (std::size_t k = 0; k < family.models.size(); ++k) {
        const auto& s = family.models[k];
        Json m;
        if (s.kind == ModelKind::factor_class) {
            m["kind"] = "factor_class";
            m["q"] = s.pattern.q;
            if (s.pattern.is_full()) {
                m["pattern"] = "full";
            } else {
                Json e = Json::array();
                for (const auto& [r, c] : s.pattern.entries) e.push_back({r, c});
                m["pattern"] = e;
            }
            m["error"] = to_string(s.error_type);
            m["bounds"] = {{"psi_min", s.bounds.psi_min}, {"psi_max", s.bounds.psi_max}, {"M", s.bounds.loading_radius}};
        } else {
            m["kind"] = "explicit_set";
            Json mats = Json::array();
            for (const auto& x : s.matrices) mats.push_back(to_json(x));
            m["matrices"] = mats;
            m["nominal_order"] = s.nominal_order;
        }
        m["complexity_scheme"] = {{"fixed", family.complexities[k]}};
        models.push_back(m);
    }
    return Json{{"p", family.p()}, {"models", models}};
}

PopulationTarget parse_target(const Json& j, const std::string& where) {
    PopulationTarget t;
    t.cov = parse_matrix(require(j, where, "cov"), where + ".cov");
    if (t.cov.rows() != t.cov.cols()) fail(where + ".cov", "must be square");
    t.mean = j.contains("mean") ? parse_vector(j["mean"], where + ".mean") : Vector::Zero(t.cov.rows());
    if (t.mean.size() != t.cov.rows()) fail(where + ".mean", "length does not match cov");
    if (!is_symmetric(t.cov) || !is_positive_definite(t.cov)) fail(where + ".cov", "must be symmetric positive definite");
    return t;
}

DataLaw parse_law(const Json& j) {
    DataLaw law;
    const PopulationTarget t = parse_target(j, "law");
    law.mean = t.mean;
    law.cov = t.cov;
    const std::string kind = j.contains("kind") ? as_string(j["kind"], "law.kind") : "gaussian";
    if (kind == "gaussian") law.kind = LawKind::gaussian;
    else if (kind == "student_t") law.kind = LawKind::student_t;
    else if (kind == "scale_mixture") law.kind = LawKind::scale_mixture;
    else fail("law.kind", "expected gaussian, student_t or scale_mixture");
    law.dof = number_or(j, "law", "dof", law.dof);
    law.mix_weight = number_or(j, "law", "mix_weight", law.mix_weight);
    law.mix_low = number_or(j, "law", "mix_low", law.mix_low);
    law.mix_high = number_or(j, "law", "mix_high", law.mix_high);
    if (law.kind == LawKind::student_t && !(law.dof > 4.0)) fail("law.dof", "must exceed 4");
    return law;
}

PenaltySystem parse_penalty(const Json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return PenaltySystem::named(penalty_kind_from_string(j.get<std::string>()));
        } catch (const ValidationError& e) {
            fail(where, e.what());
        }
    }
    if (!j.is_object()) fail(where, "expected a penalty name or object");
    const std::string kind = as_string(require(j, where, "kind"), where + ".kind");
    PenaltySystem sys;
    if (kind == "separable") {
        Multiplier mult = Multiplier::log_n_pow_alpha;
        if (j.contains("multiplier")) {
            try {
                mult = multiplier_from_string(as_string(j["multiplier"], where + ".multiplier"));
            } catch (const ValidationError& e) {
                fail(where + ".multiplier", e.what());
            }
        }
        std::vector<double> scores;
        if (j.contains("scores")) {
            const Vector v = parse_vector(j["scores"], where + ".scores");
            scores.assign(v.data(), v.data() + v.size());
        }
        sys = PenaltySystem::separable_system(mult, scores, number_or(j, where, "alpha", 1.0));
        sys.constant_value = number_or(j, where, "constant", sys.constant_value);
    } else if (kind == "table") {
        const Json& nj = require(j, where, "n");
        const Json& vj = require(j, where, "values");
        if (!nj.is_array()) fail(where + ".n", "expected an array of sample sizes");
        std::vector<long> grid;
        for (std::size_t i = 0; i < nj.size(); ++i) grid.push_back(as_integer(nj[i], where + ".n[" + std::to_string(i) + "]"));
        if (!vj.is_array()) fail(where + ".values", "expected one row per model");
        std::vector<std::vector<double>> values;
        for (std::size_t k = 0; k < vj.size(); ++k) {
            const std::string vw = where + ".values[" + std::to_string(k) + "]";
            const Vector row = parse_vector(vj[k], vw);
            if (row.size() != static_cast<Eigen::Index>(grid.size())) fail(vw, "length must match n");
            values.emplace_back(row.data(), row.data() + row.size());
        }
        sys = PenaltySystem::table_system(std::move(grid), std::move(values));
    } else {
        try {
            sys = PenaltySystem::named(penalty_kind_from_string(kind));
        } catch (const ValidationError& e) {
            fail(where + ".kind", e.what());
        }
    }
    if (j.contains("mean_penalty_p"))
        sys.mean_penalty_p = static_cast<int>(as_integer(j["mean_penalty_p"], where + ".mean_penalty_p"));
    return sys;
}

PenaltySystem parse_penalty_flag(const std::string& flag) {
    const std::string prefix = "custom:";
    if (flag.rfind(prefix, 0) == 0) return parse_penalty(read_json_file(flag.substr(prefix.size())), "penalty");
    return parse_penalty(Json(flag), "--penalty");
}

MonteCarloPlan parse_plan(const Json& j) {
    if (!j.is_object()) fail("plan", "expected an object");
    MonteCarloPlan plan;
    const Json& grid = require(j, "plan", "n_grid");
    if (!grid.is_array()) fail("n_grid", "expected an array");
    for (std::size_t i = 0; i < grid.size(); ++i) plan.n_grid.push_back(as_integer(grid[i], "n_grid[" + std::to_string(i) + "]"));
    plan.replications = static_cast<int>(as_integer(require(j, "plan", "replications"), "replications"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() && j["seed"].get<long>() < 0))
            fail("seed", "expected a nonnegative integer");
        plan.seed = j["seed"].get<std::uint64_t>();
    }
    plan.law = parse_law(require(j, "plan", "law"));
    plan.family = parse_family(require(j, "plan", "family")).family;
    if (j.contains("penalties")) {
        const Json& ps = j["penalties"];
        if (!ps.is_array()) fail("penalties", "expected an array");
        for (std::size_t i = 0; i < ps.size(); ++i) plan.systems.push_back(parse_penalty(ps[i], "penalties[" + std::to_string(i) + "]"));
    } else {
        plan.systems.push_back(PenaltySystem::named(PenaltyKind::bic));
    }
    return plan;
}

SampleMoments parse_moments(const Json& j) {
    SampleMoments m;
    m.n = as_integer(require(j, "moments", "n"), "moments.n");
    if (m.n < 1) fail("moments.n", "must be positive");
    m.cov = parse_matrix(require(j, "moments", "cov"), "moments.cov");
    m.mean = parse_vector(require(j, "moments", "mean"), "moments.mean");
    if (m.cov.rows() != m.cov.cols() || m.mean.size() != m.cov.rows()) fail("moments.cov", "dimension mismatch");
    return m;
}

Json to_json(const SampleMoments& m) { return Json{{"n", m.n}, {"mean", vec_json(m.mean)}, {"cov", to_json(m.cov)}}; }

Matrix read_csv(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open file");
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && header) continue;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            const std::string tok = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (tok.empty() || used != tok.size() || !std::isfinite(v))
                throw ValidationError(path + " line " + std::to_string(lineno) + ": not a finite number: '" + tok + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError(path + " line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(rows.front().size()) + " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path + ": no observations");
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return out;
}

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const FitResult& r) {
    Json starts = Json::array();
    for (const auto& s : r.start_outcomes) {
        starts.push_back({{"t_value", s.finite ? Json(s.t_value) : Json(nullptr)},
                          {"gradient_norm", s.gradient_norm},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"finite", s.finite}});
    }
    return Json{{"t_value", r.t_value},
                {"status", to_string(r.status)},
                {"starts_converged", r.starts_converged},
                {"gradient_norm_at_solution", r.gradient_norm_at_solution},
                {"best_start", r.best_start},
                {"sigma", r.sigma.size() ? to_json(r.sigma) : Json(nullptr)},
                {"best_point", point_json(r.best_point)},
                {"starts", starts}};
}

Json to_json(const SelectionReport& r) {
    std::vector<std::string> statuses;
    for (auto s : r.statuses) statuses.push_back(to_string(s));
    return Json{{"penalty", r.penalty},
                {"n", r.n},
                {"scores", r.scores},
                {"t_values", r.t_values},
                {"penalties", r.penalties_applied},
                {"statuses", statuses},
                {"excluded", r.excluded},
                {"reduced_set", r.reduced_set},
                {"selected_index", r.selected_index},
                {"selected_order", r.selected_order},
                {"runner_up_margin", r.runner_up_margin}};
}

Json to_json(const PopulationSummary& s) {
    Json reps = Json::array();
    for (std::size_t k = 0; k < s.pseudo_true_reps.size(); ++k) {
        Json model = Json::array();
        for (std::size_t i = 0; i < s.pseudo_true_reps[k].size(); ++i) {
            Json rep{{"sigma", to_json(s.pseudo_true_reps[k][i])}};
            if (k < s.pseudo_true_points.size() && i < s.pseudo_true_points[k].size())
                rep["point"] = point_json(s.pseudo_true_points[k][i]);
            model.push_back(rep);
        }
        reps.push_back(model);
    }
    return Json{{"v_values", s.v_values},   {"v_star", s.v_star},
                {"k_star", s.k_star},       {"q_star", s.q_star},
                {"k_zero", s.k_zero},       {"k_double_star", s.k_double_star},
                {"d_star", s.d_star},       {"epsilon_v", s.epsilon_v},
                {"epsilon_cluster", s.epsilon_cluster}, {"pseudo_true", reps}};
}

Json to_json(const AssumptionDiagnostics& d) {
    Json m3 = Json::array();
    for (std::size_t i = 0; i < d.models.size(); ++i) {
        m3.push_back({{"model", d.models[i]},
                      {"exponent", d.m3_exponents[i] ? Json(*d.m3_exponents[i]) : Json(nullptr)},
                      {"constant", d.m3_constants[i] ? Json(*d.m3_constants[i]) : Json(nullptr)},
                      {"probes_used", d.m3_probes_used[i]},
                      {"verdict", d.m3_verdicts[i]}});
    }
    return Json{{"m2", {{"hausdorff", d.m2_hausdorff}, {"threshold", d.m2_threshold}, {"pass", d.m2_pass}}},
                {"m3", m3},
                {"m3_exponent_band", {d.m3_exponent_low, d.m3_exponent_high}},
                {"notes", d.notes}};
}

Json to_json(const McReport& r) {
    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json orders = Json::object();
        for (const auto& [q, f] : c.order_frequency) orders[std::to_string(q)] = f;
        cells.push_back({{"system", c.system},
                         {"n", c.n},
                         {"order_frequency", orders},
                         {"model_frequency", c.model_frequency},
                         {"mean_margin", c.mean_margin},
                         {"median_margin", c.median_margin},
                         {"decisive_fraction", c.decisive_fraction},
                         {"selected_orders", c.selected_orders}});
    }
    return Json{{"cells", cells},
                {"replication_seeds", r.replication_seeds},
                {"decisive_threshold_per_n", r.decisive_threshold_per_n}};
}

Json to_json(const PathologyReport& r) {
    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json freq = Json::object();
        for (const auto& [name, f] : c.selection_frequency) freq[name] = f;
        cells.push_back({{"n", c.n},
                         {"selection_frequency", freq},
                         {"contrast_sd_over_sqrt_n", c.contrast_sd_over_sqrt_n},
                         {"contrast_mean_over_sqrt_n", c.contrast_mean_over_sqrt_n},
                         {"max_identity_error", c.max_identity_error},
                         {"contrasts", c.contrasts}});
    }
    return Json{{"sigma_minus", r.sigma_minus},
                {"sigma_plus", r.sigma_plus},
                {"predicted_sd_over_sqrt_n", r.predicted_sd_over_sqrt_n},
                {"cells", cells}};
}

Json to_json(const PenaltyClassification& c) {
    return Json{{"p1", verdict_json(c.p1)},
                {"p2", verdict_json(c.p2)},
                {"p3", verdict_json(c.p3)},
                {"admissible", c.admissible},
                {"notes", c.notes}};
}

std::string mc_csv(const McReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "system,n,order,frequency\n";
    for (const auto& c : r.cells)
        for (const auto& [q, f] : c.order_frequency) out << c.system << ',' << c.n << ',' << q << ',' << f << '\n';
    return out.str();
}

}  // namespace covsel::io
