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

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "qtransport/liouvillian.hpp"
#include "qtransport/model.hpp"

namespace qtransport {

enum class StationaryMethod { analytic_alpha0, analytic_general, numeric_nullspace, long_time_integration };

std::string_view to_string(StationaryMethod m);

/// Coordinates of a matrix in the invariant block spanned by
/// |0><0|, |1><1|, |psi><psi|, |eta><eta| and the psi-eta coherences.
struct SubspaceCoordinates {
    double rho00 = 0.0;
    double rho11 = 0.0;
    double rho_psipsi = 0.0;
    double rho_etaeta = 0.0;
    Complex rho_psieta{0.0, 0.0};
};

/// Kernel diagnostics produced by the null-space solver.
struct KernelReport {
    int subspace_dim = 0;       ///< 3 (parallel bright vectors) or 6
    int restricted_dim = 0;     ///< kernel dimension inside the invariant block
    int full_dim = 0;           ///< Hermitian stationary states in the full matrix space
    double smallest_singular = 0.0;
    double second_singular = 0.0;
    double leakage = 0.0;       ///< max |L B - B L_restricted|; zero when the block is invariant
};

struct StationaryResult {
    double rho00 = 0.0;
    double rho11 = 0.0;
    double rho_psipsi = 0.0;
    double rho_etaeta = 0.0;
    /// <psi|rho|eta>; real when Lamb shifts vanish.
    Complex rho_psieta{0.0, 0.0};
    DensityMatrix full_rho;
    StationaryMethod method = StationaryMethod::analytic_alpha0;
    std::optional<KernelReport> kernel;

    SubspaceCoordinates coordinates() const { return {rho00, rho11, rho_psipsi, rho_etaeta, rho_psieta}; }
    double population_sum() const { return rho00 + rho11 + rho_psipsi + rho_etaeta; }
};

/// Closed form for parallel bright vectors: populations of |0>, |1>, |psi~>
/// as quotients over the common denominator Delta. Throws
/// DegenerateModelError when Delta vanishes.
SubspaceCoordinates alpha0_closed_form(const RateSet& rates, double norm_chi_sq, double norm_psi_sq);

/// Closed form for an arbitrary bright angle with vanishing Lamb shifts.
///
/// The ratios rho11/rho00 and rho_psipsi/rho00 solve the psi-psi and 1-1
/// balance equations, rho_psieta and rho_etaeta follow from the coherence
/// and eta-eta balance, and rho00 is fixed by normalization. Parallel
/// vectors (sin_alpha <= kParallelTolerance) fall back to alpha0_closed_form.
SubspaceCoordinates general_closed_form(const RateSet& rates, double norm_chi_sq, double norm_psi_sq,
                                        double cos_alpha, double sin_alpha);

/// Alpha = 0 stationary state embedded in the canonical M = 1 system.
StationaryResult stationary_alpha0(const RateSet& rates, double norm_chi_sq, double norm_psi_sq);
/// Alpha = 0 stationary state for a geometry with parallel bright vectors.
StationaryResult stationary_alpha0(const RateSet& rates, const BrightGeometry& geom);
StationaryResult stationary_general(const RateSet& rates, const BrightGeometry& geom);

/// Kernel of the superoperator restricted to the invariant block.
///
/// The restricted kernel must be one-dimensional (AmbiguityError otherwise);
/// the smallest-singular-value direction is normalized to unit trace. The
/// full-space kernel dimension is reported alongside; it exceeds one when
/// dark states exist.
StationaryResult stationary_numeric(const LiouvillianMatrix& liouvillian, const BrightGeometry& geom);

/// Closed form where it applies, null-space solver otherwise.
StationaryResult solve_stationary(const RateSet& rates, const BrightGeometry& geom);

/// rho = sum of coordinates times the corresponding block basis matrices.
ComplexMatrix assemble_state(const SubspaceCoordinates& c, const BrightGeometry& geom);
SubspaceCoordinates project_coordinates(const ComplexMatrix& rho, const BrightGeometry& geom);

/// Orthonormal basis (real Frobenius product) of the invariant block as
/// columns of vectorized Hermitian matrices: |0><0|, |1><1|, |psi><psi| and,
/// for non-parallel vectors, |eta><eta|, (|psi><eta| + h.c.)/sqrt2,
/// i(|psi><eta| - h.c.)/sqrt2.
Eigen::MatrixXd invariant_basis(const BrightGeometry& geom);

/// Residuals of the stationarity balance equations at zero Lamb shift.
struct StationarityResiduals {
    double eq1 = 0.0;        ///< d/dt rho_psipsi with rho_psieta eliminated
    double eq2 = 0.0;        ///< d/dt rho11
    double eq3 = 0.0;        ///< d/dt rho00 with rho_psieta, rho_etaeta eliminated
    double coherence = 0.0;  ///< d/dt rho_psieta
    double eta = 0.0;        ///< d/dt rho_etaeta

    double max_abs() const;
};

StationarityResiduals stationarity_residuals(const RateSet& rates, double norm_chi_sq, double norm_psi_sq,
                                             double cos_alpha, double sin_alpha, const SubspaceCoordinates& c);

}  // namespace qtransport
