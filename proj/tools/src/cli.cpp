// Copyright 2026 The qtransport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtransport/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtransport/cli/config.hpp"
#include "qtransport/qtransport.hpp"

namespace qtransport::cli {

using nlohmann::json;

namespace {

enum class Format { csv, json };

struct Options {
    std::string verb;
    std::string config_path;
    std::string out_path;
    std::string initial = "ground";
    Format format = Format::csv;
};

// Thrown when a numerical check fails after the output was produced.
struct QualityFailure {
    std::string what;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_row(std::initializer_list<double> values, const std::string& first = {}) {
    std::string row = first;
    bool lead = true;
    for (double v : values) {
        if (!lead) row += ',';
        row += num(v);
        lead = false;
    }
    return row + '\n';
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

double residual_of(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho) {
    return max_abs(apply_total(rates, geom, rho));
}

struct Model {
    ModelConfig config;
    SystemSpec sys;
    RateSet rates;
    BrightGeometry geom;
};

Model load(const Options& o) {
    ModelConfig c = load_config(o.config_path);
    SystemSpec sys = c.system();
    RateSet rates = c.rates();
    BrightGeometry geom = bright_geometry(sys);
    return {std::move(c), std::move(sys), std::move(rates), std::move(geom)};
}

// --- stationary ------------------------------------------------------------

struct MethodRow {
    StationaryResult state;
    double flow;
    double residual;
};

std::string cmd_stationary(const Model& m, Format format, std::ostream& err) {
    std::vector<MethodRow> rows;
    auto add = [&](StationaryResult s) {
        const double f = flow_from_state(m.rates, s).F;
        const double r = residual_of(m.rates, m.geom, s.full_rho.matrix());
        rows.push_back({std::move(s), f, r});
    };

    if (m.geom.parallel()) {
        try {
            add(stationary_alpha0(m.rates, m.geom));
        } catch (const DegenerateModelError& e) {
            err << "analytic_alpha0 skipped: " << e.what() << '\n';
        }
    }
    if (m.rates.lamb_free() && !m.geom.parallel()) {
        try {
            add(stationary_general(m.rates, m.geom));
        } catch (const DegenerateModelError& e) {
            err << "analytic_general skipped: " << e.what() << '\n';
        }
    }
    std::optional<KernelReport> kernel;
    try {
        StationaryResult n = stationary_numeric(build_superoperator(m.rates, m.geom, m.geom.dim()), m.geom);
        kernel = n.kernel;
        add(std::move(n));
    } catch (const AmbiguityError& e) {
        err << "numeric_nullspace: " << e.what() << '\n';
        throw QualityFailure{"stationary state is not unique (kernel dimension " + std::to_string(e.kernel_dim()) + ")"};
    }

    double deviation = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            deviation = std::max(deviation, max_abs(rows[i].state.full_rho.matrix() - rows[j].state.full_rho.matrix()));
    const double worst_residual =
        std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.residual < b.residual; })
            ->residual;

    const auto& em = m.rates[Reservoir::em];
    const auto& ph = m.rates[Reservoir::ph];
    const auto& sk = m.rates[Reservoir::sink];
    const bool equilibrium = em.beta == ph.beta && ph.beta == sk.beta;
    const MethodRow& best = rows.front();

    std::string text;
    if (format == Format::csv) {
        text = "method,F,rho00,rho11,rho_psipsi,rho_etaeta,residual\n";
        for (const MethodRow& r : rows) {
            text += csv_row({r.flow, r.state.rho00, r.state.rho11, r.state.rho_psipsi, r.state.rho_etaeta, r.residual},
                            std::string(to_string(r.state.method)) + ",");
        }
        err << "cross_method_max_deviation: " << num(deviation) << '\n';
        if (kernel) {
            err << "kernel: restricted_dim " << kernel->restricted_dim << ", full_dim " << kernel->full_dim << '\n';
        }
    } else {
        json doc;
        json methods = json::array();
        for (const MethodRow& r : rows) {
            methods.push_back({{"method", std::string(to_string(r.state.method))},
                               {"F", r.flow},
                               {"rho00", r.state.rho00},
                               {"rho11", r.state.rho11},
                               {"rho_psipsi", r.state.rho_psipsi},
                               {"rho_etaeta", r.state.rho_etaeta},
                               {"rho_psieta", complex_json(r.state.rho_psieta)},
                               {"residual", r.residual}});
        }
        doc["methods"] = methods;
        doc["F"] = best.flow;
        doc["cross_method_max_deviation"] = deviation;
        if (kernel) {
            doc["kernel"] = {{"subspace_dim", kernel->subspace_dim},
                             {"restricted_dim", kernel->restricted_dim},
                             {"full_dim", kernel->full_dim},
                             {"smallest_singular", kernel->smallest_singular},
                             {"second_singular", kernel->second_singular},
                             {"leakage", kernel->leakage}};
        }
        doc["rho"] = matrix_json(best.state.full_rho.matrix());
        if (equilibrium) {
            const double beta = em.beta;
            doc["gibbs"] = {
                {"rho11_over_rho00", best.state.rho11 / best.state.rho00},
                {"expected_rho11_over_rho00", std::exp(-beta * (m.sys.eps1() - m.sys.eps0()))},
                {"rho_psipsi_over_rho00", best.state.rho_psipsi / best.state.rho00},
                {"expected_rho_psipsi_over_rho00", std::exp(-beta * (m.sys.eps2() - m.sys.eps0()))}};
        }
        doc["config"] = to_json(m.config);
        text = doc.dump(2) + '\n';
    }

    if (worst_residual > m.config.solver.residual_tolerance) {
        throw QualityFailure{"stationarity residual " + num(worst_residual) + " exceeds tolerance", };
    }
    if (deviation > m.config.solver.cross_method_tolerance) {
        throw QualityFailure{"methods disagree by " + num(deviation)};
    }
    return text;
}

// --- evolve ----------------------------------------------------------------

DensityMatrix read_matrix_file(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("initial: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigurationError("initial: " + std::string(e.what()));
    }
    if (doc.is_object() && doc.contains("rho")) doc = doc["rho"];
    if (!doc.is_array() || doc.size() != static_cast<std::size_t>(dim))
        throw ConfigurationError("initial: expected a " + std::to_string(dim) + " x " + std::to_string(dim) +
                                 " matrix of [re, im] pairs");
    ComplexMatrix rho(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = doc[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
            throw ConfigurationError("initial: row " + std::to_string(i) + " has the wrong length");
        for (int j = 0; j < dim; ++j) {
            const json& e = row[static_cast<std::size_t>(j)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ConfigurationError("initial: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                         ") is not an [re, im] pair");
            rho(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    try {
        return DensityMatrix::from_matrix(rho);
    } catch (const DomainError& e) {
        throw ConfigurationError("initial: " + std::string(e.what()));
    }
}

DensityMatrix initial_state(const Model& m, const std::string& selector) {
    const int d = m.geom.dim();
    if (selector == "ground") return DensityMatrix::basis_state(d, 0);
    if (selector == "sink") return DensityMatrix::basis_state(d, 1);
    if (selector == "bright_chi") return DensityMatrix::pure(embed_degenerate(m.geom.chi_hat));
    if (selector == "bright_psi") return DensityMatrix::pure(embed_degenerate(m.geom.psi_hat));
    if (selector == "dark") {
        const ComplexMatrix basis = dark_basis(m.geom);
        if (basis.cols() == 0) throw ConfigurationError("initial: no dark direction exists");
        return DensityMatrix::pure(embed_degenerate(basis.col(0)));
    }
    return read_matrix_file(selector, d);
}

std::string cmd_evolve(const Model& m, const std::string& selector, Format format, std::ostream& err) {
    const DensityMatrix rho0 = initial_state(m, selector);
    const double rate = max_rate(m.rates, m.geom);
    if (rate <= 0.0) throw ConfigurationError("model: all couplings vanish, nothing evolves");
    const double dt = m.config.solver.dt.value_or(0.05 / rate);
    const double t_end = m.config.solver.t_end.value_or(4000.0 / rate);
    EvolveOptions opts;
    opts.max_samples = m.config.solver.samples;
    opts.convergence_tolerance = std::min(opts.convergence_tolerance, m.config.solver.residual_tolerance);

    EvolutionTrace trace;
    try {
        trace = evolve(m.rates, m.geom, rho0, t_end, dt, opts);
    } catch (const PreconditionError& e) {
        throw ConfigurationError(std::string("solver.dt: ") + e.what());
    }

    std::string text;
    if (format == Format::csv) {
        text = "t,rho00,rho11,rho_psipsi,rho_etaeta,re_rho_psieta,trace\n";
        for (std::size_t k = 0; k < trace.times.size(); ++k) {
            const ComplexMatrix& s = trace.states[k];
            const SubspaceCoordinates c = project_coordinates(s, m.geom);
            text += csv_row({trace.times[k], c.rho00, c.rho11, c.rho_psipsi, c.rho_etaeta, c.rho_psieta.real(),
                             s.trace().real()});
        }
        err << "trace_drift: " << num(trace.trace_drift) << '\n'
            << "min_eigenvalue_seen: " << num(trace.min_eigenvalue_seen) << '\n'
            << "converged: " << (trace.converged ? "true" : "false") << '\n';
    } else {
        json samples = json::array();
        for (std::size_t k = 0; k < trace.times.size(); ++k) {
            const ComplexMatrix& s = trace.states[k];
            const SubspaceCoordinates c = project_coordinates(s, m.geom);
            samples.push_back({{"t", trace.times[k]},
                               {"rho00", c.rho00},
                               {"rho11", c.rho11},
                               {"rho_psipsi", c.rho_psipsi},
                               {"rho_etaeta", c.rho_etaeta},
                               {"re_rho_psieta", c.rho_psieta.real()},
                               {"trace", s.trace().real()}});
        }
        json doc = {{"initial", selector},
                    {"dt", trace.dt},
                    {"t_end", t_end},
                    {"trace_drift", trace.trace_drift},
                    {"min_eigenvalue_seen", trace.min_eigenvalue_seen},
                    {"converged", trace.converged},
                    {"final_residual", trace.final_residual},
                    {"samples", samples}};
        text = doc.dump(2) + '\n';
    }
    return text;
}

// --- sweep -----------------------------------------------------------------

std::string monotonicity(const SweepTable& t) {
    bool up = true, down = true;
    for (std::size_t k = 1; k < t.points.size(); ++k) {
        if (t.points[k].flow < t.points[k - 1].flow) up = false;
        if (t.points[k].flow > t.points[k - 1].flow) down = false;
    }
    if (up && down) return "constant";
    if (up) return "nondecreasing";
    if (down) return "nonincreasing";
    return "mixed";
}

std::string cmd_sweep(const Model& m, Format format, std::ostream& err) {
    if (!m.config.sweep) throw ConfigurationError("sweep: missing");
    SweepOptions opts;
    opts.residual_tolerance = m.config.solver.residual_tolerance;
    const SweepTable t = sweep(m.sys, m.config.reservoirs, m.config.sweep->parameter, m.config.sweep->grid, opts);

    std::string text;
    if (format == Format::csv) {
        text = "parameter,F,rho00,rho11,rho_psipsi,rho_etaeta,residual\n";
        for (const SweepPoint& p : t.points)
            text += csv_row({p.value, p.flow, p.rho00, p.rho11, p.rho_psipsi, p.rho_etaeta, p.residual});
    } else {
        json points = json::array();
        for (const SweepPoint& p : t.points) {
            json row = {{"value", p.value},           {"F", p.flow},
                        {"rho00", p.rho00},           {"rho11", p.rho11},
                        {"rho_psipsi", p.rho_psipsi}, {"rho_etaeta", p.rho_etaeta},
                        {"residual", p.residual},     {"method", std::string(to_string(p.method))},
                        {"flagged", p.flagged}};
            if (p.flagged) {
                // NaN has no JSON form.
                for (const char* k : {"F", "rho00", "rho11", "rho_psipsi", "rho_etaeta", "residual"}) row[k] = nullptr;
                row["note"] = p.note;
            }
            points.push_back(row);
        }
        text = json({{"parameter", std::string(to_string(t.parameter))}, {"points", points}}).dump(2) + '\n';
    }

    err << "flow monotonicity: " << monotonicity(t) << '\n';
    if (t.parameter == SweepParameter::gamma0_em) {
        try {
            err << "saturation: final-decade relative change " << num(final_decade_relative_change(t)) << '\n';
        } catch (const Error& e) {
            err << "saturation: " << e.what() << '\n';
        }
    }
    for (const SweepPoint& p : t.points) {
        if (p.flagged) err << "flagged point " << num(p.value) << ": " << p.note << '\n';
    }
    if (t.any_flagged()) throw QualityFailure{"sweep has flagged points"};
    return text;
}

// --- dark ------------------------------------------------------------------

std::string cmd_dark(const Model& m, Format format, std::ostream& err) {
    const ComplexMatrix projector = dark_projector(m.geom);
    const ComplexMatrix basis = dark_basis(m.geom);
    double residual = 0.0;
    for (Eigen::Index k = 0; k < basis.cols(); ++k) {
        const ComplexVector d = embed_degenerate(basis.col(k));
        residual = std::max(residual, residual_of(m.rates, m.geom, d * d.adjoint()));
    }
    std::string text;
    if (format == Format::csv) {
        text = "index,component,re,im\n";
        for (Eigen::Index k = 0; k < basis.cols(); ++k)
            for (Eigen::Index i = 0; i < basis.rows(); ++i)
                text += std::to_string(k) + ',' + std::to_string(i) + ',' + num(basis(i, k).real()) + ',' +
                        num(basis(i, k).imag()) + '\n';
        err << "rank: " << basis.cols() << '\n' << "generator_residual: " << num(residual) << '\n';
    } else {
        json vectors = json::array();
        for (Eigen::Index k = 0; k < basis.cols(); ++k) {
            json v = json::array();
            for (Eigen::Index i = 0; i < basis.rows(); ++i) v.push_back(complex_json(basis(i, k)));
            vectors.push_back(v);
        }
        text = json({{"rank", basis.cols()},
                     {"projector", matrix_json(projector)},
                     {"basis", vectors},
                     {"generator_residual", residual}})
                   .dump(2) +
               '\n';
    }
    if (m.rates.lamb_free() && residual > m.config.solver.residual_tolerance) {
        throw QualityFailure{"dark directions are not stationary (residual " + num(residual) + ")"};
    }
    return text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stationary transport through a degenerate three-level system", "qtransport"};
    app.require_subcommand(1, 1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "model configuration (JSON)")->required();
        sub->add_option("--out", o.out_path, "write results here instead of stdout");
        sub->add_option("--format", o.format, "csv or json")
            ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::csv}, {"json", Format::json}}));
    };
    for (const char* verb : {"stationary", "evolve", "sweep", "dark"}) {
        CLI::App* sub = app.add_subcommand(verb);
        add_common(sub);
        if (std::string(verb) == "evolve") {
            sub->add_option("--initial", o.initial, "ground, sink, bright_chi, bright_psi, dark, or a matrix file");
        }
        sub->callback([&o, verb] { o.verb = verb; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::string text;
    int code = kExitOk;
    try {
        const Model m = load(o);
        if (o.verb == "stationary") {
            text = cmd_stationary(m, o.format, err);
        } else if (o.verb == "evolve") {
            text = cmd_evolve(m, o.initial, o.format, err);
        } else if (o.verb == "sweep") {
            text = cmd_sweep(m, o.format, err);
        } else {
            text = cmd_dark(m, o.format, err);
        }
    } catch (const ConfigurationError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const QualityFailure& e) {
        err << "numerical failure: " << e.what << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }

    if (o.out_path.empty()) {
        out << text;
    } else {
        std::ofstream file(o.out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot write '" << o.out_path << "'\n";
            return kExitConfig;
        }
        file << text;
    }
    return code;
}

}  // namespace qtransport::cli
