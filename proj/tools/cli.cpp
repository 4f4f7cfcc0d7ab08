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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <optional>

#include "covsel/errors.hpp"
#include "covsel/io.hpp"
#include "covsel/penalties.hpp"
#include "covsel/population.hpp"
#include "covsel/select.hpp"
#include "covsel/simulate.hpp"

namespace covsel::cli {

namespace {

using io::Json;

struct Config {
    std::string data, moments, save_moments, family, penalty, out, target, hypothesis, plan, csv;
    bool header = false;
    bool json = false;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    int model = -1;
    double sigma_minus = 0.5;
    std::vector<long> n_grid;
    int replications = 500;
    int probes = 40;
    double eta = 0.1;
};

FitOptions fit_options(const Config& c) {
    FitOptions o;
    o.seed = c.seed.value_or(0);
    o.threads = c.threads;
    return o;
}

PopulationOptions population_options(const Config& c) {
    PopulationOptions o;
    o.fit.seed = c.seed.value_or(0);
    o.fit.threads = c.threads;
    return o;
}

SampleMoments load_moments(const Config& c, int p) {
    SampleMoments m;
    if (!c.moments.empty()) {
        m = io::parse_moments(io::read_json_file(c.moments));
    } else if (!c.data.empty()) {
        m = compute_moments(io::read_csv(c.data, c.header));
    } else {
        throw ValidationError("--data or --moments is required");
    }
    if (m.p() != p)
        throw ValidationError("data has " + std::to_string(m.p()) + " columns but the family has p = " + std::to_string(p));
    if (!c.save_moments.empty()) io::write_json_file(c.save_moments, io::to_json(m));
    return m;
}

io::FamilyDocument load_family(const Config& c) {
    if (c.family.empty()) throw ValidationError("--family is required");
    return io::parse_family(io::read_json_file(c.family));
}

PopulationTarget load_target(const Config& c, const io::FamilyDocument& doc) {
    PopulationTarget t;
    if (!c.target.empty()) t = io::parse_target(io::read_json_file(c.target));
    else if (doc.target) t = *doc.target;
    else throw ValidationError("a population target is required (--target or \"target\" in the family file)");
    if (t.p() != doc.family.p()) throw ValidationError("target dimension does not match the family");
    return t;
}

PenaltySystem choose_penalty(const Config& c, const io::FamilyDocument& doc) {
    if (!c.penalty.empty()) return io::parse_penalty_flag(c.penalty);
    if (doc.penalty) return *doc.penalty;
    return PenaltySystem::named(PenaltyKind::bic);
}

void emit(const Config& c, const Json& report, std::ostream& out) {
    if (!c.out.empty()) io::write_json_file(c.out, report);
    if (c.json) out << report.dump(2) << "\n";
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s << std::setprecision(prec) << std::fixed << v;
    return s.str();
}

int cmd_select(const Config& c, std::ostream& out, Json& partial) {
    const auto doc = load_family(c);
    const PenaltySystem sys = choose_penalty(c, doc);
    const SampleMoments m = load_moments(c, doc.family.p());
    partial["n"] = m.n;
    const SelectionReport r = select_model(doc.family, m, sys, fit_options(c));
    out << "penalty " << r.penalty << ", n = " << r.n << "\n";
    out << std::setw(4) << "k" << std::setw(7) << "order" << std::setw(18) << "T" << std::setw(14) << "penalty"
        << std::setw(18) << "score" << "  status\n";
    for (std::size_t k = 0; k < r.scores.size(); ++k) {
        out << std::setw(4) << k << std::setw(7) << doc.family.models[k].order() << std::setw(18) << fmt(r.t_values[k])
            << std::setw(14) << fmt(r.penalties_applied[k]) << std::setw(18) << fmt(r.scores[k]) << "  "
            << to_string(r.statuses[k]) << (static_cast<int>(k) == r.selected_index ? "  *" : "") << "\n";
    }
    out << "selected model " << r.selected_index << " (order " << r.selected_order << "), margin "
        << fmt(r.runner_up_margin) << "\n";
    emit(c, io::to_json(r), out);
    return 0;
}

int cmd_fit(const Config& c, std::ostream& out, Json& partial) {
    const auto doc = load_family(c);
    const SampleMoments m = load_moments(c, doc.family.p());
    const int models = static_cast<int>(doc.family.size());
    if (c.model >= models) throw ValidationError("--model out of range");
    Json fits = Json::array();
    partial["fits"] = Json::array();
    for (int k = 0; k < models; ++k) {
        if (c.model >= 0 && k != c.model) continue;
        const FitResult f = fit_class(doc.family.models[static_cast<std::size_t>(k)], m, fit_options(c),
                                      static_cast<std::uint64_t>(k));
        Json j = io::to_json(f);
        j["model"] = k;
        fits.push_back(j);
        partial["fits"] = fits;
        out << "model " << k << ": T = " << fmt(f.t_value) << ", " << to_string(f.status) << ", "
            << f.starts_converged << " starts converged\n";
    }
    emit(c, Json{{"n", m.n}, {"fits", fits}}, out);
    return 0;
}

int cmd_population(const Config& c, std::ostream& out, Json&) {
    const auto doc = load_family(c);
    const PopulationTarget t = load_target(c, doc);
    const PopulationSummary s = pseudo_true_summary(doc.family, t, population_options(c));
    for (std::size_t k = 0; k < s.v_values.size(); ++k)
        out << "model " << k << " (order " << doc.family.models[k].order() << "): V = " << fmt(s.v_values[k], 8) << "\n";
    out << "q* = " << s.q_star << ", d* = " << s.d_star << "\n";
    emit(c, io::to_json(s), out);
    return 0;
}

int cmd_diagnose(const Config& c, std::ostream& out, Json& partial) {
    const auto doc = load_family(c);
    const PopulationTarget t = load_target(c, doc);
    const auto popts = population_options(c);
    const PopulationSummary s = pseudo_true_summary(doc.family, t, popts);
    partial["summary"] = io::to_json(s);
    const AssumptionDiagnostics d = diagnose_assumptions(doc.family, s, t, c.probes, c.eta, popts);
    out << "M2 Hausdorff " << std::scientific << d.m2_hausdorff << " (threshold " << d.m2_threshold << "): "
        << (d.m2_pass ? "pass" : "fail") << std::defaultfloat << "\n";
    for (std::size_t i = 0; i < d.models.size(); ++i) {
        out << "M3 model " << d.models[i] << ": exponent "
            << (d.m3_exponents[i] ? fmt(*d.m3_exponents[i], 3) : std::string("n/a")) << " [" << d.m3_verdicts[i] << "]\n";
    }
    emit(c, Json{{"summary", io::to_json(s)}, {"diagnostics", io::to_json(d)}}, out);
    return 0;
}

int cmd_simulate(const Config& c, std::ostream& out, Json&) {
    if (c.plan.empty()) throw ValidationError("--plan is required");
    MonteCarloPlan plan = io::parse_plan(io::read_json_file(c.plan));
    if (c.seed) plan.seed = *c.seed;
    FitOptions o = fit_options(c);
    o.seed = plan.seed;
    const McReport r = run_monte_carlo(plan, o);
    out << std::setw(10) << "system" << std::setw(9) << "n" << "  order frequencies\n";
    for (const auto& cell : r.cells) {
        out << std::setw(10) << cell.system << std::setw(9) << cell.n << " ";
        for (const auto& [q, f] : cell.order_frequency) out << " q=" << q << ":" << fmt(f, 3);
        out << "\n";
    }
    emit(c, io::to_json(r), out);
    if (!c.csv.empty()) io::write_text_file(c.csv, io::mc_csv(r));
    return 0;
}

int cmd_pathology(const Config& c, std::ostream& out, Json&) {
    std::vector<long> grid = c.n_grid.empty() ? std::vector<long>{1000, 10000, 100000} : c.n_grid;
    std::vector<PenaltySystem> systems{c.penalty.empty() ? PenaltySystem::named(PenaltyKind::bic)
                                                         : io::parse_penalty_flag(c.penalty)};
    const PathologyReport r = pathology_two_point(c.sigma_minus, grid, c.replications, c.seed.value_or(0), systems);
    out << "sigma_minus = " << r.sigma_minus << ", sigma_plus = " << std::setprecision(10) << r.sigma_plus
        << std::defaultfloat << "\n";
    for (const auto& cell : r.cells) {
        out << "n = " << cell.n << ": sd(contrast)/sqrt(n) = " << fmt(cell.contrast_sd_over_sqrt_n, 4);
        for (const auto& [name, f] : cell.selection_frequency)
            out << ", " << name << " picks " << fmt(f[0], 3) << " / " << fmt(f[1], 3);
        out << "\n";
    }
    emit(c, io::to_json(r), out);
    return 0;
}

int cmd_classify(const Config& c, std::ostream& out, Json& partial) {
    const auto doc = load_family(c);
    OrderStructure order;
    if (!c.hypothesis.empty()) {
        const Json h = io::read_json_file(c.hypothesis);
        try {
            order.k_star = h.at("k_star").get<std::vector<int>>();
            order.q_star = h.at("q_star").get<int>();
            order.k_zero = h.contains("k_zero") ? h["k_zero"].get<std::vector<int>>() : std::vector<int>{};
        } catch (const Json::exception& e) {
            throw ValidationError("hypothesis: " + std::string(e.what()));
        }
        if (order.k_zero.empty())
            for (int k : order.k_star)
                if (doc.family.models.at(static_cast<std::size_t>(k)).order() == order.q_star) order.k_zero.push_back(k);
        order.hypothesized = true;
    } else {
        const PopulationTarget t = load_target(c, doc);
        order = pseudo_true_summary(doc.family, t, population_options(c)).order_structure();
    }
    partial["k_star"] = order.k_star;
    std::vector<PenaltySystem> systems;
    if (!c.penalty.empty()) systems.push_back(io::parse_penalty_flag(c.penalty));
    else if (doc.penalty) systems.push_back(*doc.penalty);
    else
        for (auto k : {PenaltyKind::bic, PenaltyKind::caic, PenaltyKind::hbic, PenaltyKind::ssbic, PenaltyKind::hq,
                       PenaltyKind::aic})
            systems.push_back(PenaltySystem::named(k));
    Json classes = Json::object();
    out << std::setw(8) << "system" << std::setw(10) << "P1" << std::setw(10) << "P2" << std::setw(10) << "P3"
        << "  admissible\n";
    for (const auto& s : systems) {
        const PenaltyClassification pc = classify_penalty(s, doc.family, order);
        classes[s.name()] = io::to_json(pc);
        out << std::setw(8) << s.name() << std::setw(10) << to_string(pc.p1) << std::setw(10) << to_string(pc.p2)
            << std::setw(10) << to_string(pc.p3) << "  " << (pc.admissible ? "yes" : "no") << "\n";
    }
    emit(c, Json{{"order", {{"k_star", order.k_star}, {"q_star", order.q_star}, {"k_zero", order.k_zero},
                            {"hypothesized", order.hypothesized}}},
                 {"classifications", classes}},
         out);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"covsel: information-criterion selection of factor covariance classes"};
    app.require_subcommand(1);
    Config c;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "root seed for all randomness");
        sub->add_option("--threads", c.threads, "worker count hint")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", c.out, "JSON report path");
        sub->add_flag("--json", c.json, "print the JSON report");
    };
    auto data_opts = [&](CLI::App* sub) {
        sub->add_option("--data", c.data, "CSV data, one observation per row");
        sub->add_flag("--header", c.header, "CSV has a header line");
        sub->add_option("--moments", c.moments, "moments JSON sidecar");
        sub->add_option("--save-moments", c.save_moments, "write the moments sidecar");
    };

    auto* s_select = app.add_subcommand("select", "fit every candidate and select by penalized likelihood");
    common(s_select);
    data_opts(s_select);
    s_select->add_option("--family", c.family)->required();
    s_select->add_option("--penalty", c.penalty, "bic|caic|hbic|ssbic|hq|aic|custom:<file>");

    auto* s_fit = app.add_subcommand("fit", "fit candidate classes");
    common(s_fit);
    data_opts(s_fit);
    s_fit->add_option("--family", c.family)->required();
    s_fit->add_option("--model", c.model, "fit only this 0-based model index");

    auto* s_pop = app.add_subcommand("population", "pseudo-true values and order structure");
    common(s_pop);
    s_pop->add_option("--family", c.family)->required();
    s_pop->add_option("--target", c.target, "population target JSON");

    auto* s_diag = app.add_subcommand("diagnose", "identifiability and margin diagnostics");
    common(s_diag);
    s_diag->add_option("--family", c.family)->required();
    s_diag->add_option("--target", c.target, "population target JSON");
    s_diag->add_option("--probes", c.probes, "margin probes per model");
    s_diag->add_option("--eta", c.eta, "largest probe radius");

    auto* s_sim = app.add_subcommand("simulate", "Monte Carlo selection frequencies");
    common(s_sim);
    s_sim->add_option("--plan", c.plan)->required();
    s_sim->add_option("--csv", c.csv, "flat system,n,order,frequency table");

    auto* s_path = app.add_subcommand("pathology", "two-point family with a flat likelihood contrast");
    common(s_path);
    s_path->add_option("--sigma-minus", c.sigma_minus, "value in (0, 1)");
    s_path->add_option("--n-grid", c.n_grid, "sample sizes")->delimiter(',');
    s_path->add_option("--replications", c.replications);
    s_path->add_option("--penalty", c.penalty);

    auto* s_class = app.add_subcommand("classify-penalty", "check penalty systems against the consistency conditions");
    common(s_class);
    s_class->add_option("--family", c.family)->required();
    s_class->add_option("--penalty", c.penalty);
    s_class->add_option("--target", c.target, "population target JSON");
    s_class->add_option("--hypothesis", c.hypothesis, "JSON with k_star, q_star and optional k_zero");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }
    for (auto* sub : app.get_subcommands())
        if (sub->count("--seed") > 0) c.seed = seed;

    Json partial = Json::object();
    try {
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "select") return cmd_select(c, out, partial);
        if (name == "fit") return cmd_fit(c, out, partial);
        if (name == "population") return cmd_population(c, out, partial);
        if (name == "diagnose") return cmd_diagnose(c, out, partial);
        if (name == "simulate") return cmd_simulate(c, out, partial);
        if (name == "pathology") return cmd_pathology(c, out, partial);
        return cmd_classify(c, out, partial);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        if (!c.out.empty()) {
            try {
                io::write_json_file(c.out, Json{{"error", e.what()}, {"partial", partial}});
            } catch (const std::exception&) {
            }
        }
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace covsel::cli
