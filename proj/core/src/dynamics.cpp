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

#include "qtransport/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtransport/errors.hpp"

namespace qtransport {

namespace {

// Distances below this are indistinguishable from round-off.
constexpr double kDistanceFloor = 1e-11;
// Tail window: from this fraction of the initial distance down to 100 x floor.
constexpr double kTailStart = 1e-2;
constexpr double kTailMonotoneSlack = 0.05;

}  // namespace

EvolutionTrace evolve(const RateSet& rates, const BrightGeometry& geom, const DensityMatrix& rho0, double t_end,
                      double dt, const EvolveOptions& options) {
    if (rho0.dim() != geom.dim()) throw DomainError("initial state dimension does not match M + 2");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
    const double scale = max_rate(rates, geom);
    if (dt * scale > options.stability_bound) {
        throw PreconditionError("time step " + std::to_string(dt) + " exceeds stability bound " +
                                std::to_string(options.stability_bound) + " / max_rate = " +
                                std::to_string(options.stability_bound / scale));
    }

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    const double h = t_end / static_cast<double>(steps);
    const std::size_t stride = std::max<std::size_t>(1, (steps + options.max_samples - 2) /
                                                            std::max<std::size_t>(1, options.max_samples - 1));

    EvolutionTrace trace;
    trace.dt = h;
    trace.times.push_back(0.0);
    trace.states.push_back(rho0.matrix());
    trace.min_eigenvalue_seen = min_hermitian_eigenvalue(rho0.matrix());

    auto rhs = [&](const ComplexMatrix& r) { return apply_total(rates, geom, r); };

    ComplexMatrix rho = rho0.matrix();
    for (std::size_t n = 1; n <= steps; ++n) {
        const ComplexMatrix k1 = rhs(rho);
        const ComplexMatrix k2 = rhs(rho + 0.5 * h * k1);
        const ComplexMatrix k3 = rhs(rho + 0.5 * h * k2);
        const ComplexMatrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double drift = std::abs(rho.trace() - Complex{1.0, 0.0});
        rho = (0.5 * (rho + rho.adjoint())).eval();
        const double lmin = min_hermitian_eigenvalue(rho);

        trace.trace_drift = std::max(trace.trace_drift, drift);
        trace.min_eigenvalue_seen = std::min(trace.min_eigenvalue_seen, lmin);
        if (drift > options.quality_tolerance || lmin < -options.quality_tolerance) {
            throw IntegrationQualityError("integration lost trace or positivity at t = " +
                                          std::to_string(static_cast<double>(n) * h) + " (drift " +
                                          std::to_string(drift) + ", min eigenvalue " + std::to_string(lmin) +
                                          "); use a smaller dt");
        }

        if (n % stride == 0 || n == steps) {
            trace.times.push_back(static_cast<double>(n) * h);
            trace.states.push_back(rho);
        }
    }

    trace.final_residual = max_abs(rhs(rho));
    trace.converged = trace.final_residual < options.convergence_tolerance;
    return trace;
}

double relaxation_rate(const EvolutionTrace& trace) {
    if (trace.states.size() < 10) throw FitError("relaxation fit needs at least 10 samples");
    if (!trace.converged) throw FitError("relaxation fit needs a converged trace");

    const ComplexMatrix& final_state = trace.states.back();
    std::vector<double> dist(trace.states.size());
    for (std::size_t k = 0; k < dist.size(); ++k) dist[k] = max_abs(trace.states[k] - final_state);

    const double d0 = *std::max_element(dist.begin(), dist.end());
    if (d0 <= 10.0 * kDistanceFloor) return 0.0;

    const double upper = kTailStart * d0;
    const double lower = 100.0 * kDistanceFloor;
    std::vector<double> ts;
    std::vector<double> logs;
    double previous = 0.0;
    bool started = false;
    for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
        const double d = dist[k];
        if (!started) {
            if (d > upper) continue;
            started = true;
        } else if (d > previous * (1.0 + kTailMonotoneSlack)) {
            throw FitError("distance to the fixed point is not monotone in the tail");
        }
        previous = d;
        if (d < lower) break;
        ts.push_back(trace.times[k]);
        logs.push_back(std::log(d));
    }
    if (ts.size() < 3) throw FitError("too few tail samples for the exponential fit");

    const double n = static_cast<double>(ts.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        st += ts[k];
        sl += logs[k];
        stt += ts[k] * ts[k];
        stl += ts[k] * logs[k];
    }
    const double denom = n * stt - st * st;
    if (denom <= 0.0) throw FitError("degenerate time grid in the tail");
    const double slope = (n * stl - st * sl) / denom;
    return std::max(0.0, -slope);
}

}  // namespace qtransport
