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

#include "qtransport/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtransport/errors.hpp"

namespace qtransport {

std::string_view to_string(Reservoir r) {
    switch (r) {
        case Reservoir::em:
            return "em";
        case Reservoir::ph:
            return "ph";
        case Reservoir::sink:
            return "sink";
    }
    return "?";
}

Reservoir reservoir_from_string(std::string_view label) {
    for (Reservoir r : kReservoirs) {
        if (to_string(r) == label) return r;
    }
    throw ConfigurationError("unknown reservoir label '" + std::string(label) + "'");
}

SystemSpec SystemSpec::create(double eps0, double eps1, double eps2, ComplexVector chi, ComplexVector psi) {
    if (!std::isfinite(eps0) || !std::isfinite(eps1) || !std::isfinite(eps2)) {
        throw DomainError("energies must be finite");
    }
    if (!(eps0 < eps1 && eps1 < eps2)) {
        throw DomainError("energies must satisfy eps0 < eps1 < eps2");
    }
    if (chi.size() < 1) throw DomainError("degenerate dimension M must be at least 1");
    if (chi.size() != psi.size()) {
        throw DomainError("chi and psi must both have length M");
    }
    if (!chi.allFinite() || !psi.allFinite()) throw DomainError("bright vectors must be finite");
    if (chi.norm() == 0.0) throw DomainError("bright photonic vector chi is zero");
    if (psi.norm() == 0.0) throw DomainError("bright phononic vector psi is zero");
    return SystemSpec(eps0, eps1, eps2, std::move(chi), std::move(psi));
}

double SystemSpec::bohr(Reservoir r) const noexcept {
    switch (r) {
        case Reservoir::em:
            return eps2_ - eps0_;
        case Reservoir::ph:
            return eps2_ - eps1_;
        case Reservoir::sink:
            return eps1_ - eps0_;
    }
    return 0.0;
}

bool RateSet::lamb_free() const noexcept {
    for (const auto& r : per_reservoir) {
        if (r.gp_im != 0.0 || r.gm_im != 0.0) return false;
    }
    return true;
}

double planck_occupation(double beta, double omega) {
    const double x = beta * omega;
    if (!(x > 0.0)) {
        throw DomainError("planck_occupation requires beta * omega > 0");
    }
    return 1.0 / std::expm1(x);
}

RateSet build_rates(const SystemSpec& sys, const std::array<ReservoirSpec, 3>& reservoirs) {
    std::array<bool, 3> seen{};
    RateSet rates;
    for (const ReservoirSpec& spec : reservoirs) {
        const auto idx = static_cast<std::size_t>(spec.label);
        if (idx >= seen.size()) throw ConfigurationError("invalid reservoir label");
        if (seen[idx]) {
            throw ConfigurationError("reservoir '" + std::string(to_string(spec.label)) + "' given twice");
        }
        seen[idx] = true;
        if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
            throw DomainError("reservoir '" + std::string(to_string(spec.label)) + "': beta must be positive");
        }
        if (!(spec.gamma0_re >= 0.0) || !std::isfinite(spec.gamma0_re)) {
            throw DomainError("reservoir '" + std::string(to_string(spec.label)) +
                              "': gamma0_re must be nonnegative");
        }
        if (!std::isfinite(spec.lamb_plus) || !std::isfinite(spec.lamb_minus)) {
            throw DomainError("reservoir '" + std::string(to_string(spec.label)) + "': Lamb shifts must be finite");
        }
        const double omega = sys.bohr(spec.label);
        const double n = planck_occupation(spec.beta, omega);
        ReservoirRates& r = rates[spec.label];
        r.gp_re = spec.gamma0_re * n;
        r.gm_re = spec.gamma0_re * (n + 1.0);
        r.gp_im = spec.lamb_plus;
        r.gm_im = spec.lamb_minus;
        r.bohr = omega;
        r.beta = spec.beta;
    }
    for (Reservoir r : kReservoirs) {
        if (!seen[static_cast<std::size_t>(r)]) {
            throw ConfigurationError("reservoir '" + std::string(to_string(r)) + "' missing");
        }
    }
    return rates;
}

namespace {

// Unit vector orthogonal to `u` (|u| = 1, size >= 2), built from the
// coordinate axis with the smallest overlap.
ComplexVector orthogonal_unit(const ComplexVector& u) {
    Eigen::Index k = 0;
    u.cwiseAbs().minCoeff(&k);
    ComplexVector e = ComplexVector::Zero(u.size());
    e(k) = 1.0;
    e -= u.dot(e) * u;
    return e / e.norm();
}

}  // namespace

BrightGeometry bright_geometry(const SystemSpec& sys) {
    BrightGeometry g;
    g.norm_chi = sys.chi().norm();
    g.norm_psi = sys.psi().norm();
    if (g.norm_chi == 0.0 || g.norm_psi == 0.0) throw DomainError("bright vectors must be nonzero");

    g.chi_hat = sys.chi() / g.norm_chi;
    g.psi_hat = sys.psi() / g.norm_psi;

    const Complex overlap = g.psi_hat.dot(g.chi_hat);
    const double abs_overlap = std::abs(overlap);
    g.phase = abs_overlap > 0.0 ? overlap / abs_overlap : Complex{1.0, 0.0};

    const ComplexVector perp = g.chi_hat - overlap * g.psi_hat;
    const double perp_norm = perp.norm();

    if (perp_norm > kParallelTolerance) {
        g.cos_alpha = std::min(abs_overlap, 1.0);
        g.sin_alpha = std::min(perp_norm, 1.0);
        g.eta_hat = ComplexVector(std::conj(g.phase) * perp / perp_norm);
    } else {
        g.cos_alpha = 1.0;
        g.sin_alpha = 0.0;
        if (g.degenerate_dim() >= 2) g.eta_hat = orthogonal_unit(g.psi_hat);
    }
    return g;
}

SystemSpec with_bright_angle(const SystemSpec& sys, double alpha) {
    if (!std::isfinite(alpha)) throw DomainError("angle must be finite");
    const BrightGeometry g = bright_geometry(sys);
    if (!g.eta_hat) {
        if (alpha == 0.0) return sys;
        throw DomainError("a nonzero bright angle needs degenerate dimension M >= 2");
    }
    ComplexVector chi = g.norm_chi * (std::cos(alpha) * g.psi_hat + std::sin(alpha) * *g.eta_hat);
    return SystemSpec::create(sys.eps0(), sys.eps1(), sys.eps2(), std::move(chi), sys.psi());
}

ComplexVector embed_degenerate(const ComplexVector& v) {
    ComplexVector out = ComplexVector::Zero(v.size() + 2);
    out.tail(v.size()) = v;
    return out;
}

}  // namespace qtransport
