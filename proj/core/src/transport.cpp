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

#include "qtransport/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Eigenvalues>

#include "qtransport/errors.hpp"
#include "qtransport/liouvillian.hpp"

namespace qtransport {

namespace {

constexpr double kBetaMatchTolerance = 1e-12;
constexpr double kFormAgreement = 1e-9;

bool same_beta(double x, double y) { return std::abs(x - y) <= kBetaMatchTolerance * std::max(std::abs(x), std::abs(y)); }

// g+em g-ph g-sink - g-em g+ph g+sink
double cycle_imbalance(const RateSet& r) {
    return r[Reservoir::em].gp_re * r[Reservoir::ph].gm_re * r[Reservoir::sink].gm_re -
           r[Reservoir::em].gm_re * r[Reservoir::ph].gp_re * r[Reservoir::sink].gp_re;
}

// g-em g+ph g+sink (exp((beta_ph - beta_em)(eps2 - eps0)) - 1); equals the
// imbalance when beta_ph == beta_sink.
double exponential_imbalance(const RateSet& r) {
    const double omega = r[Reservoir::em].bohr;
    const double factor = std::expm1((r[Reservoir::ph].beta - r[Reservoir::em].beta) * omega);
    return r[Reservoir::em].gm_re * r[Reservoir::ph].gp_re * r[Reservoir::sink].gp_re * factor;
}

// Compared on the imbalance itself, relative to the larger of the two cycle
// products, so that near-equilibrium cancellation does not trip the check.
void check_forms_agree(const RateSet& r) {
    const double forward = r[Reservoir::em].gp_re * r[Reservoir::ph].gm_re * r[Reservoir::sink].gm_re;
    const double backward = r[Reservoir::em].gm_re * r[Reservoir::ph].gp_re * r[Reservoir::sink].gp_re;
    const double scale = std::max({forward, backward, std::numeric_limits<double>::min()});
    if (std::abs(cycle_imbalance(r) - exponential_imbalance(r)) > kFormAgreement * scale) {
        throw Error("closed-form flow: difference and exponential forms disagree");
    }
}

}  // namespace

double sink_flow(const RateSet& rates, double rho00, double rho11) {
    const ReservoirRates& s = rates[Reservoir::sink];
    return 2.0 * s.gm_re * rho11 - 2.0 * s.gp_re * rho00;
}

FlowResult flow_from_state(const RateSet& rates, const StationaryResult& state) {
    return FlowResult{sink_flow(rates, state.rho00, state.rho11), state, std::nullopt};
}

FlowDecomposition alpha0_flow_terms(const RateSet& rates, double a, double b) {
    const auto& em = rates[Reservoir::em];
    const auto& ph = rates[Reservoir::ph];
    const auto& sk = rates[Reservoir::sink];
    FlowDecomposition d;
    d.denominator = (ph.gp_re * em.gp_re + ph.gm_re * em.gp_re + ph.gp_re * em.gm_re) * a * b +
                    (ph.gp_re * sk.gp_re + ph.gm_re * sk.gp_re + ph.gm_re * sk.gm_re) * b +
                    (em.gp_re * sk.gm_re + em.gm_re * sk.gp_re + em.gm_re * sk.gm_re) * a;
    if (d.denominator == 0.0) throw DegenerateModelError("vanishing denominator: Delta (all couplings vanish)");
    d.numerator = 2.0 * a * b * cycle_imbalance(rates);
    d.prefactor = 1.0;
    if (same_beta(ph.beta, sk.beta)) {
        d.exponential_form = 2.0 * a * b * exponential_imbalance(rates) / d.denominator;
    }
    return d;
}

FlowResult flow_alpha0(const RateSet& rates, double a, double b) {
    if (!same_beta(rates[Reservoir::ph].beta, rates[Reservoir::sink].beta)) {
        throw PreconditionError("flow_alpha0 assumes beta_ph == beta_sink");
    }
    const FlowDecomposition d = alpha0_flow_terms(rates, a, b);
    check_forms_agree(rates);
    // The exponential form cancels exactly at equal temperatures.
    return FlowResult{*d.exponential_form, stationary_alpha0(rates, a, b), d};
}

FlowResult flow_general(const RateSet& rates, const BrightGeometry& geom) {
    if (!rates.lamb_free()) throw PreconditionError("flow_general assumes vanishing Lamb shifts");
    StationaryResult state = stationary_general(rates, geom);

    const auto& em = rates[Reservoir::em];
    const auto& ph = rates[Reservoir::ph];
    const auto& sk = rates[Reservoir::sink];
    const double a = geom.norm_chi_sq();
    const double b = geom.norm_psi_sq();
    const double c2 = geom.cos_alpha * geom.cos_alpha;

    FlowDecomposition d;
    d.numerator = 2.0 * a * b * c2 * cycle_imbalance(rates);
    d.denominator = a * b * c2 * em.gm_re * ph.gp_re + sk.gm_re * (a * em.gm_re + b * ph.gm_re);
    if (d.denominator == 0.0) throw DegenerateModelError("vanishing denominator in the general flow");
    d.prefactor = state.rho00;
    const double f = d.prefactor * d.numerator / d.denominator;
    if (same_beta(ph.beta, sk.beta)) {
        d.exponential_form = d.prefactor * 2.0 * a * b * c2 * exponential_imbalance(rates) / d.denominator;
        check_forms_agree(rates);
    }
    return FlowResult{f, std::move(state), d};
}

std::vector<AngleLawRow> numerator_angle_law(const RateSet& rates, const SystemSpec& base,
                                             std::span<const double> alphas) {
    std::vector<AngleLawRow> rows;
    rows.reserve(alphas.size());
    double reference = std::numeric_limits<double>::quiet_NaN();
    for (double alpha : alphas) {
        const BrightGeometry geom = bright_geometry(with_bright_angle(base, alpha));
        const StationaryResult state = stationary_general(rates, geom);
        const FlowResult exact = flow_from_state(rates, state);
        const FlowResult closed = flow_general(rates, geom);

        AngleLawRow row;
        row.alpha = alpha;
        row.cos_sq = std::cos(alpha) * std::cos(alpha);
        row.flow = exact.F;
        row.scaled_numerator = exact.F * closed.decomposition->denominator / state.rho00;
        row.numerator_over_cos_sq =
            row.cos_sq > 1e-12 ? row.scaled_numerator / row.cos_sq : std::numeric_limits<double>::quiet_NaN();
        if (rows.empty()) reference = exact.F;
        row.flow_ratio = exact.F / reference;
        rows.push_back(row);
    }
    return rows;
}

ComplexMatrix dark_projector(const BrightGeometry& geom) {
    const int m = geom.degenerate_dim();
    ComplexMatrix p = ComplexMatrix::Identity(m, m);
    p -= geom.psi_hat * geom.psi_hat.adjoint();
    if (!geom.parallel() && geom.eta_hat) p -= *geom.eta_hat * geom.eta_hat->adjoint();
    return (0.5 * (p + p.adjoint())).eval();
}

ComplexMatrix dark_basis(const BrightGeometry& geom) {
    const ComplexMatrix p = dark_projector(geom);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(p);
    const Eigen::VectorXd& w = solver.eigenvalues();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (w(k) > 0.5) keep.push_back(k);
    }
    ComplexMatrix basis(p.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(keep[k]);
    return basis;
}

std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::alpha:
            return "alpha";
        case SweepParameter::gamma0_em:
            return "gamma0_em";
        case SweepParameter::beta_em:
            return "beta_em";
    }
    return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view name) {
    for (SweepParameter p : {SweepParameter::alpha, SweepParameter::gamma0_em, SweepParameter::beta_em}) {
        if (to_string(p) == name) return p;
    }
    throw ConfigurationError("unknown sweep parameter '" + std::string(name) + "'");
}

bool SweepTable::any_flagged() const {
    return std::any_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.flagged; });
}

namespace {

SweepPoint evaluate_point(const SystemSpec& sys, std::array<ReservoirSpec, 3> reservoirs, SweepParameter parameter,
                          double value, double tolerance) {
    SweepPoint point;
    point.value = value;
    try {
        SystemSpec local = sys;
        auto em = std::find_if(reservoirs.begin(), reservoirs.end(),
                               [](const ReservoirSpec& r) { return r.label == Reservoir::em; });
        switch (parameter) {
            case SweepParameter::alpha:
                local = with_bright_angle(sys, value);
                break;
            case SweepParameter::gamma0_em:
                if (em == reservoirs.end()) throw ConfigurationError("reservoir 'em' missing");
                em->gamma0_re = value;
                break;
            case SweepParameter::beta_em:
                if (em == reservoirs.end()) throw ConfigurationError("reservoir 'em' missing");
                em->beta = value;
                break;
        }
        const RateSet rates = build_rates(local, reservoirs);
        const BrightGeometry geom = bright_geometry(local);
        const StationaryResult state = solve_stationary(rates, geom);
        point.flow = sink_flow(rates, state.rho00, state.rho11);
        point.rho00 = state.rho00;
        point.rho11 = state.rho11;
        point.rho_psipsi = state.rho_psipsi;
        point.rho_etaeta = state.rho_etaeta;
        point.method = state.method;
        point.residual = max_abs(apply_total(rates, geom, state.full_rho.matrix()));
        if (!(point.residual <= tolerance)) {
            point.flagged = true;
            point.note = "stationarity residual above tolerance";
        }
    } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        point.flow = point.rho00 = point.rho11 = point.rho_psipsi = point.rho_etaeta = point.residual = nan;
        point.flagged = true;
        point.note = e.what();
    }
    return point;
}

}  // namespace

SweepTable sweep(const SystemSpec& sys, const std::array<ReservoirSpec, 3>& reservoirs, SweepParameter parameter,
                 std::span<const double> grid, const SweepOptions& options) {
    for (double v : grid) {
        if (!std::isfinite(v)) throw DomainError("sweep grid contains a non-finite value");
    }
    if (grid.size() >= 2) {
        const bool up = grid[1] > grid[0];
        for (std::size_t k = 1; k < grid.size(); ++k) {
            if (up ? !(grid[k] > grid[k - 1]) : !(grid[k] < grid[k - 1])) {
                throw DomainError("sweep grid must be strictly monotone");
            }
        }
    }

    SweepTable table;
    table.parameter = parameter;
    table.points.resize(grid.size());

    unsigned workers = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, grid.size())));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            table.points[k] = evaluate_point(sys, reservoirs, parameter, grid[k], options.residual_tolerance);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return table;
}

double final_decade_relative_change(const SweepTable& table) {
    if (table.points.size() < 2) throw DomainError("saturation diagnostic needs at least two points");
    const SweepPoint& last = table.points.back();
    const double target = std::log10(std::abs(last.value)) - 1.0;
    const SweepPoint* best = nullptr;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < table.points.size(); ++k) {
        const double gap = std::abs(std::log10(std::abs(table.points[k].value)) - target);
        if (gap < best_gap) {
            best_gap = gap;
            best = &table.points[k];
        }
    }
    return last.flow / best->flow - 1.0;
}

}  // namespace qtransport
