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

#include <cstddef>
#include <vector>

#include "qtransport/liouvillian.hpp"
#include "qtransport/model.hpp"

namespace qtransport {

struct EvolveOptions {
    /// Upper bound on stored samples (initial and final state always kept).
    std::size_t max_samples = 2001;
    /// dt * max_rate must not exceed this.
    double stability_bound = 0.1;
    /// Drift or negativity beyond this aborts the run.
    double quality_tolerance = 1e-6;
    /// max |d rho / dt| below this marks the run as converged.
    double convergence_tolerance = 1e-10;
};

/// Sampled trajectory of the master equation with quality monitors.
struct EvolutionTrace {
    std::vector<double> times;
    /// Re-Hermitized snapshots; not renormalized, so drift stays visible.
    std::vector<ComplexMatrix> states;
    double trace_drift = 0.0;          ///< max |tr rho - 1| over every step, before re-Hermitization
    double min_eigenvalue_seen = 1.0;  ///< smallest eigenvalue over every step
    bool converged = false;
    double final_residual = 0.0;       ///< max-abs entry of the generator applied to the final state
    double dt = 0.0;                   ///< step actually used (t_end / number of steps)
};

/// Fixed-step classical RK4 integration of d rho/dt = (theta_em + theta_ph + theta_sink)(rho).
///
/// Each step is re-Hermitized. Throws PreconditionError when dt violates the
/// stability bound and IntegrationQualityError when trace drift or the most
/// negative eigenvalue exceed `quality_tolerance`.
EvolutionTrace evolve(const RateSet& rates, const BrightGeometry& geom, const DensityMatrix& rho0, double t_end,
                      double dt, const EvolveOptions& options = {});

/// Exponential decay rate of max|rho(t) - rho_final| over the tail of a
/// converged trace. Returns 0 when the trace starts at the fixed point.
double relaxation_rate(const EvolutionTrace& trace);

}  // namespace qtransport
