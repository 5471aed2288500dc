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

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace qtransport {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Below this value of sin(alpha) the bright vectors are treated as parallel.
inline constexpr double kParallelTolerance = 1e-12;

/// The three bosonic reservoirs: light, protein vibrations, reaction-center sink.
enum class Reservoir : std::size_t { em = 0, ph = 1, sink = 2 };

inline constexpr std::array<Reservoir, 3> kReservoirs{Reservoir::em, Reservoir::ph, Reservoir::sink};

std::string_view to_string(Reservoir r);
/// Throws ConfigurationError for an unknown label.
Reservoir reservoir_from_string(std::string_view label);

/// Three-level system with an M-fold degenerate upper level.
///
/// Basis: index 0 is the ground state |0>, index 1 the sink level |1>,
/// indices 2..M+1 span the degenerate level. The bright vectors chi (light)
/// and psi (phonons) are given as M-component vectors inside that block and
/// keep their norms, which scale the corresponding couplings.
class SystemSpec {
public:
    /// Validates eps0 < eps1 < eps2, M >= 1, equal lengths and nonzero vectors.
    static SystemSpec create(double eps0, double eps1, double eps2, ComplexVector chi, ComplexVector psi);

    double eps0() const noexcept { return eps0_; }
    double eps1() const noexcept { return eps1_; }
    double eps2() const noexcept { return eps2_; }
    const ComplexVector& chi() const noexcept { return chi_; }
    const ComplexVector& psi() const noexcept { return psi_; }

    /// Dimension M of the degenerate level.
    int degenerate_dim() const noexcept { return static_cast<int>(chi_.size()); }
    /// Total Hilbert-space dimension D = M + 2.
    int dim() const noexcept { return degenerate_dim() + 2; }

    double bohr(Reservoir r) const noexcept;

private:
    SystemSpec(double eps0, double eps1, double eps2, ComplexVector chi, ComplexVector psi)
        : eps0_(eps0), eps1_(eps1), eps2_(eps2), chi_(std::move(chi)), psi_(std::move(psi)) {}

    double eps0_, eps1_, eps2_;
    ComplexVector chi_, psi_;
};

/// Thermal reservoir parameters.
///
/// gamma0_re is the effective zero-temperature emission rate; the thermal
/// rates follow as gamma0_re * N and gamma0_re * (N + 1). Lamb-shift
/// coefficients are supplied directly. Only the products beta * omega enter,
/// so any consistent unit system works.
struct ReservoirSpec {
    Reservoir label = Reservoir::em;
    double beta = 1.0;
    double gamma0_re = 0.0;
    double lamb_plus = 0.0;
    double lamb_minus = 0.0;
};

struct ReservoirRates {
    double gp_re = 0.0;  ///< absorption rate gamma^+_re
    double gm_re = 0.0;  ///< emission rate gamma^-_re
    double gp_im = 0.0;  ///< Lamb shift gamma^+_im
    double gm_im = 0.0;  ///< Lamb shift gamma^-_im
    double bohr = 0.0;
    double beta = 0.0;
};

/// Rate coefficients of the three generators, indexed by Reservoir.
struct RateSet {
    std::array<ReservoirRates, 3> per_reservoir{};

    const ReservoirRates& operator[](Reservoir r) const { return per_reservoir[static_cast<std::size_t>(r)]; }
    ReservoirRates& operator[](Reservoir r) { return per_reservoir[static_cast<std::size_t>(r)]; }

    bool lamb_free() const noexcept;
};

/// Decomposition chi_hat = phase * (cos_alpha * psi_hat + sin_alpha * eta_hat).
struct BrightGeometry {
    double norm_chi = 0.0;
    double norm_psi = 0.0;
    double cos_alpha = 1.0;
    double sin_alpha = 0.0;
    Complex phase{1.0, 0.0};
    ComplexVector chi_hat;
    ComplexVector psi_hat;
    /// Absent only when M = 1 and the vectors are necessarily parallel.
    std::optional<ComplexVector> eta_hat;

    int degenerate_dim() const noexcept { return static_cast<int>(psi_hat.size()); }
    int dim() const noexcept { return degenerate_dim() + 2; }
    double norm_chi_sq() const noexcept { return norm_chi * norm_chi; }
    double norm_psi_sq() const noexcept { return norm_psi * norm_psi; }
    bool parallel() const noexcept { return sin_alpha <= kParallelTolerance; }
};

/// Bose-Einstein occupation 1 / (exp(beta * omega) - 1); requires beta * omega > 0.
double planck_occupation(double beta, double omega);

/// Thermal rates for the three reservoirs. Labels must be exactly {em, ph, sink}.
RateSet build_rates(const SystemSpec& sys, const std::array<ReservoirSpec, 3>& reservoirs);

BrightGeometry bright_geometry(const SystemSpec& sys);

/// Copy of `sys` with chi rotated to angle alpha from psi, keeping |chi|.
///
/// The rotation plane is spanned by psi_hat and the current eta_hat of `sys`
/// (or a fixed unit vector orthogonal to psi_hat when the vectors are
/// parallel). Requires M >= 2 unless alpha == 0.
SystemSpec with_bright_angle(const SystemSpec& sys, double alpha);

/// Lift a degenerate-block vector into the full D-dimensional space.
ComplexVector embed_degenerate(const ComplexVector& v);

}  // namespace qtransport
