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

#include "qtransport/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "qtransport/errors.hpp"

namespace qtransport::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigurationError(field + ": " + why);
}

void only_keys(const json& obj, const std::string& field, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(field, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.contains(key)) fail(field.empty() ? key : field + "." + key, "unknown key");
    }
}

const json& require(const json& obj, const std::string& field, const char* key) {
    if (!obj.contains(key)) fail(field + "." + key, "missing");
    return obj.at(key);
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return x;
}

std::vector<Complex> complex_list(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) fail(field, "expected a non-empty list of [re, im] pairs");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        const json& e = v[i];
        if (!e.is_array() || e.size() != 2) fail(f, "expected an [re, im] pair");
        out.emplace_back(number(e[0], f + "[0]"), number(e[1], f + "[1]"));
    }
    return out;
}

ComplexVector to_vector(const std::vector<Complex>& v) {
    ComplexVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

std::vector<double> parse_grid(const json& g, const std::string& field) {
    std::vector<double> grid;
    if (g.is_array()) {
        for (std::size_t i = 0; i < g.size(); ++i) grid.push_back(number(g[i], field + "[" + std::to_string(i) + "]"));
    } else if (g.is_object()) {
        only_keys(g, field, {"start", "stop", "count", "spacing"});
        const double start = number(require(g, field, "start"), field + ".start");
        const double stop = number(require(g, field, "stop"), field + ".stop");
        const json& c = require(g, field, "count");
        if (!c.is_number_integer() || c.get<long long>() < 2) fail(field + ".count", "expected an integer >= 2");
        const auto count = c.get<std::size_t>();
        std::string spacing = "linear";
        if (g.contains("spacing")) {
            if (!g["spacing"].is_string()) fail(field + ".spacing", "expected \"linear\" or \"log\"");
            spacing = g["spacing"].get<std::string>();
        }
        if (spacing == "linear") {
            for (std::size_t k = 0; k < count; ++k)
                grid.push_back(start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1));
        } else if (spacing == "log") {
            if (start <= 0.0 || stop <= 0.0) fail(field, "log spacing needs positive start and stop");
            const double l0 = std::log10(start), l1 = std::log10(stop);
            for (std::size_t k = 0; k < count; ++k)
                grid.push_back(std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(count - 1)));
            grid.front() = start;
            grid.back() = stop;
        } else {
            fail(field + ".spacing", "expected \"linear\" or \"log\"");
        }
    } else {
        fail(field, "expected a list of values or {start, stop, count, spacing}");
    }
    if (grid.size() < 2) fail(field, "needs at least two points");
    const bool up = grid[1] > grid[0];
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if ((up && !(grid[k] > grid[k - 1])) || (!up && !(grid[k] < grid[k - 1]))) fail(field, "must be strictly monotone");
    }
    return grid;
}

}  // namespace

SystemSpec ModelConfig::system() const { return SystemSpec::create(eps0, eps1, eps2, to_vector(chi), to_vector(psi)); }

RateSet ModelConfig::rates() const { return build_rates(system(), reservoirs); }

ModelConfig parse_config(const json& doc) {
    only_keys(doc, "", {"energies", "degenerate_dim", "chi", "psi", "reservoirs", "solver", "sweep"});
    ModelConfig c;

    const json& e = require(doc, "config", "energies");
    only_keys(e, "energies", {"eps0", "eps1", "eps2"});
    c.eps0 = number(require(e, "energies", "eps0"), "energies.eps0");
    c.eps1 = number(require(e, "energies", "eps1"), "energies.eps1");
    c.eps2 = number(require(e, "energies", "eps2"), "energies.eps2");
    if (!(c.eps0 < c.eps1 && c.eps1 < c.eps2)) fail("energies", "must satisfy eps0 < eps1 < eps2");

    const json& m = require(doc, "config", "degenerate_dim");
    if (!m.is_number_integer() || m.get<long long>() < 1) fail("degenerate_dim", "expected an integer >= 1");
    const auto dim = m.get<std::size_t>();
    c.chi = complex_list(require(doc, "config", "chi"), "chi");
    c.psi = complex_list(require(doc, "config", "psi"), "psi");
    if (c.chi.size() != dim) fail("chi", "length must equal degenerate_dim");
    if (c.psi.size() != dim) fail("psi", "length must equal degenerate_dim");

    const json& r = require(doc, "config", "reservoirs");
    only_keys(r, "reservoirs", {"em", "ph", "sink"});
    for (std::size_t k = 0; k < kReservoirs.size(); ++k) {
        const std::string name(to_string(kReservoirs[k]));
        const std::string field = "reservoirs." + name;
        const json& res = require(r, "reservoirs", name.c_str());
        only_keys(res, field, {"beta", "gamma0_re", "lamb_plus", "lamb_minus"});
        ReservoirSpec& s = c.reservoirs[k];
        s.label = kReservoirs[k];
        s.beta = number(require(res, field, "beta"), field + ".beta");
        s.gamma0_re = number(require(res, field, "gamma0_re"), field + ".gamma0_re");
        s.lamb_plus = res.contains("lamb_plus") ? number(res["lamb_plus"], field + ".lamb_plus") : 0.0;
        s.lamb_minus = res.contains("lamb_minus") ? number(res["lamb_minus"], field + ".lamb_minus") : 0.0;
        if (s.beta <= 0.0) fail(field + ".beta", "must be positive");
        if (s.gamma0_re < 0.0) fail(field + ".gamma0_re", "must be nonnegative");
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        only_keys(s, "solver", {"dt", "t_end", "tolerances", "samples"});
        if (s.contains("dt")) {
            c.solver.dt = number(s["dt"], "solver.dt");
            if (*c.solver.dt <= 0.0) fail("solver.dt", "must be positive");
        }
        if (s.contains("t_end")) {
            c.solver.t_end = number(s["t_end"], "solver.t_end");
            if (*c.solver.t_end <= 0.0) fail("solver.t_end", "must be positive");
        }
        if (s.contains("tolerances")) {
            const json& t = s["tolerances"];
            only_keys(t, "solver.tolerances", {"residual", "cross_method"});
            if (t.contains("residual")) c.solver.residual_tolerance = number(t["residual"], "solver.tolerances.residual");
            if (t.contains("cross_method"))
                c.solver.cross_method_tolerance = number(t["cross_method"], "solver.tolerances.cross_method");
            if (c.solver.residual_tolerance <= 0.0) fail("solver.tolerances.residual", "must be positive");
            if (c.solver.cross_method_tolerance <= 0.0) fail("solver.tolerances.cross_method", "must be positive");
        }
        if (s.contains("samples")) {
            if (!s["samples"].is_number_integer() || s["samples"].get<long long>() < 2)
                fail("solver.samples", "expected an integer >= 2");
            c.solver.samples = s["samples"].get<std::size_t>();
        }
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        only_keys(s, "sweep", {"parameter", "grid"});
        const json& p = require(s, "sweep", "parameter");
        if (!p.is_string()) fail("sweep.parameter", "expected alpha, gamma0_em or beta_em");
        SweepConfig sc;
        try {
            sc.parameter = sweep_parameter_from_string(p.get<std::string>());
        } catch (const ConfigurationError& err) {
            fail("sweep.parameter", err.what());
        }
        sc.grid = parse_grid(require(s, "sweep", "grid"), "sweep.grid");
        c.sweep = std::move(sc);
    }

    // Module-level preconditions, reported against the config.
    try {
        (void)bright_geometry(c.system());
        (void)c.rates();
    } catch (const Error& err) {
        fail("model", err.what());
    }
    return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("config: cannot open '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigurationError("config: " + std::string(err.what()));
    }
    return parse_config(doc);
}

json to_json(const ModelConfig& c) {
    auto pairs = [](const std::vector<Complex>& v) {
        json out = json::array();
        for (const Complex& z : v) out.push_back({z.real(), z.imag()});
        return out;
    };
    json doc;
    doc["energies"] = {{"eps0", c.eps0}, {"eps1", c.eps1}, {"eps2", c.eps2}};
    doc["degenerate_dim"] = c.chi.size();
    doc["chi"] = pairs(c.chi);
    doc["psi"] = pairs(c.psi);
    for (const ReservoirSpec& r : c.reservoirs) {
        doc["reservoirs"][std::string(to_string(r.label))] = {
            {"beta", r.beta}, {"gamma0_re", r.gamma0_re}, {"lamb_plus", r.lamb_plus}, {"lamb_minus", r.lamb_minus}};
    }
    json solver = {{"tolerances", {{"residual", c.solver.residual_tolerance},
                                   {"cross_method", c.solver.cross_method_tolerance}}},
                   {"samples", c.solver.samples}};
    if (c.solver.dt) solver["dt"] = *c.solver.dt;
    if (c.solver.t_end) solver["t_end"] = *c.solver.t_end;
    doc["solver"] = solver;
    if (c.sweep) doc["sweep"] = {{"parameter", std::string(to_string(c.sweep->parameter))}, {"grid", c.sweep->grid}};
    return doc;
}

}  // namespace qtransport::cli
