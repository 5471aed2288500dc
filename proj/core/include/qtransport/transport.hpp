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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtransport/model.hpp"
#include "qtransport/stationary.hpp"

namespace qtransport {

/// Pieces of a closed-form flow F = prefactor * numerator / denominator.
struct FlowDecomposition {
    double numerator = 0.0;    ///< 2 |chi|^2 |psi|^2 cos^2(alpha) (g+em g-ph g-sink - g-em g+ph g+sink)
    double denominator = 0.0;  ///< Delta (alpha = 0) or the rho11/rho00 denominator (general angle)
    double prefactor = 1.0;    ///< 1 for the alpha = 0 form, rho00 for the general form
    /// Same flow written with the temperature factor exp((beta_ph - beta_em)(eps2 - eps0)) - 1;
    /// present only when beta_ph == beta_sink.
    std::optional<double> exponential_form;
};

/// Net exciton flow into the sink; positive means absorption by the sink.
struct FlowResult {
    double F = 0.0;
    StationaryResult state;
    std::optional<FlowDecomposition> decomposition;
};

/// F = 2 g-sink rho11 - 2 g+sink rho00.
double sink_flow(const RateSet& rates, double rho00, double rho11);

FlowResult flow_from_state(const RateSet& rates, const StationaryResult& state);

/// Difference-of-products closed form for parallel bright vectors. Valid for
/// any temperatures; the exponential form is filled in when beta_ph == beta_sink.
FlowDecomposition alpha0_flow_terms(const RateSet& rates, double norm_chi_sq, double norm_psi_sq);

/// Closed-form flow for parallel bright vectors.
///
/// Requires beta_ph == beta_sink (PreconditionError otherwise) and checks the
/// difference-of-products form against the exponential form.
FlowResult flow_alpha0(const RateSet& rates, double norm_chi_sq, double norm_psi_sq);

/// Closed-form flow for an arbitrary angle at zero Lamb shift, with rho00
/// from stationary_general.
FlowResult flow_general(const RateSet& rates, const BrightGeometry& geom);

struct AngleLawRow {
    double alpha = 0.0;
    double cos_sq = 0.0;
    double flow = 0.0;                  ///< exact F(alpha)
    double flow_ratio = 0.0;            ///< F(alpha) / F(first grid point)
    double scaled_numerator = 0.0;      ///< F * denominator / rho00
    double numerator_over_cos_sq = 0.0; ///< NaN where cos^2 alpha vanishes
};

/// Separates the cos^2(alpha) law of the flow numerator from the angle
/// dependence of rho00 and of the denominator. Rates and norms stay fixed
/// while chi is rotated in the plane of psi (see with_bright_angle).
std::vector<AngleLawRow> numerator_angle_law(const RateSet& rates, const SystemSpec& base,
                                             std::span<const double> alphas);

/// Orthogonal projector (M x M) onto the complement of span{chi, psi} in the degenerate level.
ComplexMatrix dark_projector(const BrightGeometry& geom);
/// Orthonormal columns spanning the range of dark_projector.
ComplexMatrix dark_basis(const BrightGeometry& geom);

enum class SweepParameter { alpha, gamma0_em, beta_em };

std::string_view to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(std::string_view name);

struct SweepPoint {
    double value = 0.0;
    double flow = 0.0;
    double rho00 = 0.0;
    double rho11 = 0.0;
    double rho_psipsi = 0.0;
    double rho_etaeta = 0.0;
    double residual = 0.0;  ///< max-abs entry of the generator on the stationary state
    StationaryMethod method = StationaryMethod::analytic_general;
    bool flagged = false;
    std::string note;
};

struct SweepTable {
    SweepParameter parameter = SweepParameter::alpha;
    std::vector<SweepPoint> points;

    bool any_flagged() const;
};

struct SweepOptions {
    double residual_tolerance = 1e-8;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Recomputes rates, geometry and the stationary state at each grid value;
/// points are independent and evaluated concurrently, output in grid order.
SweepTable sweep(const SystemSpec& sys, const std::array<ReservoirSpec, 3>& reservoirs, SweepParameter parameter,
                 std::span<const double> grid, const SweepOptions& options = {});

/// F(last) / F(point nearest to last / 10) - 1 for a log-spaced sweep.
double final_decade_relative_change(const SweepTable& table);

}  // namespace qtransport
