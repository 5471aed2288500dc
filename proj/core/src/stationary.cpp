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

#include "qtransport/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "qtransport/errors.hpp"

namespace qtransport {

namespace {

// Singular values below this fraction of the largest count as zero.
constexpr double kKernelTolerance = 1e-10;

struct Rates {
    double ep, em, pp, pm, sp, sm;
};

Rates unpack(const RateSet& rates) {
    return {rates[Reservoir::em].gp_re, rates[Reservoir::em].gm_re, rates[Reservoir::ph].gp_re,
            rates[Reservoir::ph].gm_re, rates[Reservoir::sink].gp_re, rates[Reservoir::sink].gm_re};
}

void require_finite_nonzero(double value, const char* what) {
    if (value == 0.0 || !std::isfinite(value)) {
        throw DegenerateModelError(std::string("vanishing denominator: ") + what);
    }
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

DensityMatrix to_density(ComplexMatrix m) {
    m = (0.5 * (m + m.adjoint())).eval();
    return DensityMatrix::from_matrix(std::move(m));
}

StationaryResult make_result(const SubspaceCoordinates& c, const BrightGeometry& geom, StationaryMethod method) {
    return StationaryResult{c.rho00,  c.rho11, c.rho_psipsi, c.rho_etaeta, c.rho_psieta,
                            to_density(assemble_state(c, geom)), method, std::nullopt};
}

// Canonical M = 1 geometry with unit bright vectors and the given norms.
BrightGeometry canonical_geometry(double norm_chi_sq, double norm_psi_sq) {
    BrightGeometry g;
    g.norm_chi = std::sqrt(norm_chi_sq);
    g.norm_psi = std::sqrt(norm_psi_sq);
    g.chi_hat = ComplexVector::Ones(1);
    g.psi_hat = ComplexVector::Ones(1);
    return g;
}

}  // namespace

std::string_view to_string(StationaryMethod m) {
    switch (m) {
        case StationaryMethod::analytic_alpha0:
            return "analytic_alpha0";
        case StationaryMethod::analytic_general:
            return "analytic_general";
        case StationaryMethod::numeric_nullspace:
            return "numeric_nullspace";
        case StationaryMethod::long_time_integration:
            return "long_time_integration";
    }
    return "?";
}

SubspaceCoordinates alpha0_closed_form(const RateSet& rates, double a, double b) {
    const auto [ep, em, pp, pm, sp, sm] = unpack(rates);
    const double delta = (pp * ep + pm * ep + pp * em) * a * b + (pp * sp + pm * sp + pm * sm) * b +
                         (ep * sm + em * sp + em * sm) * a;
    require_finite_nonzero(delta, "Delta (all couplings vanish)");

    SubspaceCoordinates c;
    c.rho_psipsi = (ep * pp * a * b + ep * sm * a + pp * sp * b) / delta;
    c.rho11 = (ep * pm * a * b + em * sp * a + pm * sp * b) / delta;
    c.rho00 = (em * pp * a * b + em * sm * a + pm * sm * b) / delta;
    return c;
}

SubspaceCoordinates general_closed_form(const RateSet& rates, double a, double b, double cos_alpha, double sin_alpha) {
    if (!rates.lamb_free()) {
        throw PreconditionError("the general closed form assumes vanishing Lamb shifts");
    }
    if (sin_alpha <= kParallelTolerance) return alpha0_closed_form(rates, a, b);

    const auto [ep, em, pp, pm, sp, sm] = unpack(rates);
    const double c2 = cos_alpha * cos_alpha;
    const double s2 = sin_alpha * sin_alpha;

    const double d_full = a * em + b * pm;       // |chi|^2 g-em + |psi|^2 g-ph
    const double d_perp = a * s2 * em + b * pm;  // same with the chi component along eta only
    const double q = a * b * c2 * em * pp + sm * d_full;
    require_finite_nonzero(q, "rho11/rho00 denominator");
    require_finite_nonzero(pm, "phonon emission rate");
    require_finite_nonzero(em, "photon emission rate");
    require_finite_nonzero(d_perp, "coherence denominator");

    const double r11 = (a * b * c2 * ep * pm + sp * d_full) / q;
    const double rpp = (pp * (a * b * c2 * ep * pm + sp * d_perp) + a * c2 * ep * pm * sm) / (pm * q);
    const double rpe = a * cos_alpha * sin_alpha * (ep - em * rpp) / d_perp;
    const double ree = (ep * (d_perp - a * c2 * em) + a * c2 * em * em * rpp) / (em * d_perp);

    const double total = 1.0 + r11 + rpp + ree;
    require_finite_nonzero(total, "normalization");
    SubspaceCoordinates c;
    c.rho00 = 1.0 / total;
    c.rho11 = r11 * c.rho00;
    c.rho_psipsi = rpp * c.rho00;
    c.rho_etaeta = ree * c.rho00;
    c.rho_psieta = rpe * c.rho00;
    return c;
}

StationaryResult stationary_alpha0(const RateSet& rates, double norm_chi_sq, double norm_psi_sq) {
    if (!(norm_chi_sq >= 0.0) || !(norm_psi_sq >= 0.0)) throw DomainError("squared norms must be nonnegative");
    const BrightGeometry g = canonical_geometry(norm_chi_sq, norm_psi_sq);
    return make_result(alpha0_closed_form(rates, norm_chi_sq, norm_psi_sq), g, StationaryMethod::analytic_alpha0);
}

StationaryResult stationary_alpha0(const RateSet& rates, const BrightGeometry& geom) {
    if (!geom.parallel()) {
        throw PreconditionError("stationary_alpha0 requires parallel bright vectors (sin_alpha = " +
                                std::to_string(geom.sin_alpha) + ")");
    }
    return make_result(alpha0_closed_form(rates, geom.norm_chi_sq(), geom.norm_psi_sq()), geom,
                       StationaryMethod::analytic_alpha0);
}

StationaryResult stationary_general(const RateSet& rates, const BrightGeometry& geom) {
    if (geom.parallel()) return stationary_alpha0(rates, geom);
    const SubspaceCoordinates c =
        general_closed_form(rates, geom.norm_chi_sq(), geom.norm_psi_sq(), geom.cos_alpha, geom.sin_alpha);
    return make_result(c, geom, StationaryMethod::analytic_general);
}

Eigen::MatrixXd invariant_basis(const BrightGeometry& geom) {
    const int d = geom.dim();
    const bool with_eta = !geom.parallel() && geom.eta_hat.has_value();
    const int k = with_eta ? 6 : 3;
    Eigen::MatrixXd basis(2 * d * d, k);

    ComplexVector e0 = ComplexVector::Zero(d);
    e0(0) = 1.0;
    ComplexVector e1 = ComplexVector::Zero(d);
    e1(1) = 1.0;
    const ComplexVector psi = embed_degenerate(geom.psi_hat);

    basis.col(0) = vectorize(projector(e0));
    basis.col(1) = vectorize(projector(e1));
    basis.col(2) = vectorize(projector(psi));
    if (with_eta) {
        const ComplexVector eta = embed_degenerate(*geom.eta_hat);
        const ComplexMatrix pe = psi * eta.adjoint();
        const double r = 1.0 / std::sqrt(2.0);
        basis.col(3) = vectorize(projector(eta));
        basis.col(4) = vectorize(r * (pe + pe.adjoint()));
        basis.col(5) = vectorize(Complex{0.0, r} * (pe - pe.adjoint()));
    }
    return basis;
}

ComplexMatrix assemble_state(const SubspaceCoordinates& c, const BrightGeometry& geom) {
    const int d = geom.dim();
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    rho(0, 0) = c.rho00;
    rho(1, 1) = c.rho11;
    const ComplexVector psi = embed_degenerate(geom.psi_hat);
    rho += c.rho_psipsi * projector(psi);
    if (geom.eta_hat) {
        const ComplexVector eta = embed_degenerate(*geom.eta_hat);
        rho += c.rho_etaeta * projector(eta);
        rho += c.rho_psieta * (psi * eta.adjoint());
        rho += std::conj(c.rho_psieta) * (eta * psi.adjoint());
    } else if (c.rho_etaeta != 0.0 || c.rho_psieta != Complex{0.0, 0.0}) {
        throw DomainError("eta coordinates given but the geometry has no eta direction");
    }
    return rho;
}

SubspaceCoordinates project_coordinates(const ComplexMatrix& rho, const BrightGeometry& geom) {
    if (rho.rows() != geom.dim() || rho.cols() != geom.dim()) throw DomainError("dimension mismatch");
    SubspaceCoordinates c;
    c.rho00 = rho(0, 0).real();
    c.rho11 = rho(1, 1).real();
    const ComplexVector psi = embed_degenerate(geom.psi_hat);
    c.rho_psipsi = psi.dot(rho * psi).real();
    if (geom.eta_hat) {
        const ComplexVector eta = embed_degenerate(*geom.eta_hat);
        c.rho_etaeta = eta.dot(rho * eta).real();
        c.rho_psieta = psi.dot(rho * eta);
    }
    return c;
}

StationaryResult stationary_numeric(const LiouvillianMatrix& liouvillian, const BrightGeometry& geom) {
    if (liouvillian.dim() != geom.dim()) throw DomainError("superoperator and geometry dimensions differ");

    const Eigen::MatrixXd basis = invariant_basis(geom);
    const Eigen::MatrixXd image = liouvillian.matrix() * basis;
    const Eigen::MatrixXd restricted = basis.transpose() * image;

    KernelReport report;
    report.subspace_dim = static_cast<int>(basis.cols());
    report.leakage = (image - basis * restricted).cwiseAbs().maxCoeff();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double scale = sv(0);
    if (!(scale > 0.0)) {
        throw AmbiguityError("restricted generator vanishes identically", report.subspace_dim);
    }
    const Eigen::Index last = sv.size() - 1;
    report.smallest_singular = sv(last);
    report.second_singular = sv(last - 1);
    report.restricted_dim = static_cast<int>((sv.array() <= kKernelTolerance * scale).count());

    Eigen::BDCSVD<Eigen::MatrixXd> full(liouvillian.matrix());
    const Eigen::VectorXd& fsv = full.singularValues();
    const int full_real_nullity = static_cast<int>((fsv.array() <= kKernelTolerance * fsv(0)).count());
    report.full_dim = full_real_nullity / 2;

    if (report.restricted_dim != 1) {
        throw AmbiguityError("restricted stationary kernel has dimension " + std::to_string(report.restricted_dim),
                             report.restricted_dim);
    }

    Eigen::VectorXd x = svd.matrixV().col(last);
    double trace = x(0) + x(1) + x(2);
    if (report.subspace_dim == 6) trace += x(3);
    if (std::abs(trace) < 1e-300) throw AmbiguityError("stationary kernel vector is traceless", 1);
    x /= trace;

    SubspaceCoordinates c;
    c.rho00 = x(0);
    c.rho11 = x(1);
    c.rho_psipsi = x(2);
    if (report.subspace_dim == 6) {
        c.rho_etaeta = x(3);
        c.rho_psieta = Complex{x(4), x(5)} / std::sqrt(2.0);
    }

    ComplexMatrix rho = unvectorize(basis * x, geom.dim());
    StationaryResult result{c.rho00,    c.rho11,        c.rho_psipsi,
                            c.rho_etaeta, c.rho_psieta, to_density(std::move(rho)),
                            StationaryMethod::numeric_nullspace, report};
    return result;
}

StationaryResult solve_stationary(const RateSet& rates, const BrightGeometry& geom) {
    try {
        if (geom.parallel()) return stationary_alpha0(rates, geom);
        if (rates.lamb_free()) return stationary_general(rates, geom);
    } catch (const DegenerateModelError&) {
        // fall through to the null-space solver
    }
    return stationary_numeric(build_superoperator(rates, geom, geom.dim()), geom);
}

double StationarityResiduals::max_abs() const {
    return std::max({std::abs(eq1), std::abs(eq2), std::abs(eq3), std::abs(coherence), std::abs(eta)});
}

StationarityResiduals stationarity_residuals(const RateSet& rates, double a, double b, double cos_alpha,
                                             double sin_alpha, const SubspaceCoordinates& c) {
    const auto [ep, em, pp, pm, sp, sm] = unpack(rates);
    const double c2 = cos_alpha * cos_alpha;
    const double s2 = sin_alpha * sin_alpha;
    const double cs = cos_alpha * sin_alpha;
    const double d_full = a * em + b * pm;
    const double d_perp = a * s2 * em + b * pm;
    const double r0 = c.rho00;
    const double r1 = c.rho11;
    const double rpp = c.rho_psipsi;
    const double ree = c.rho_etaeta;

    StationarityResiduals r;
    r.eq1 = -rpp * (a * em * pm + b * pm * pm) + r1 * pp * d_perp + r0 * a * c2 * ep * pm;
    r.eq2 = rpp * b * pm - r1 * (b * pp + sm) + r0 * sp;
    r.eq3 = rpp * a * b * c2 * em * pm + r1 * sm * d_perp - r0 * (a * b * c2 * ep * pm + sp * d_perp);
    r.coherence = std::abs(a * cs * (2.0 * ep * r0 - em * (rpp + ree)) - d_full * c.rho_psieta);
    r.eta = em * s2 * ree - s2 * ep * r0 + em * cs * c.rho_psieta.real();
    return r;
}

}  // namespace qtransport
