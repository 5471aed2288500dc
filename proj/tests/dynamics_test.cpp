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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "qtransport/dynamics.hpp"
#include "qtransport/errors.hpp"
#include "qtransport/stationary.hpp"
#include "qtransport/transport.hpp"
#include "test_support.hpp"

namespace qtransport {
namespace {

// Moderate temperatures and couplings so that relaxation is fast enough
// for long-time tests to stay short.
testing::RandomModel relaxing_model(double alpha = 0.7, int m = 2) {
    std::mt19937_64 rng(101);
    const SystemSpec sys = testing::system_at_angle(rng, m, alpha, 1.2, 0.9, 0.0, 1.0, 2.0);
    auto res = testing::reservoirs(0.5, 1.0, 1.5, 1.2, 1.5, 0.8);
    const RateSet rates = build_rates(sys, res);
    return {sys, res, rates, bright_geometry(sys)};
}

TEST(Evolve, StationaryStatePersists) {
    const testing::RandomModel m = relaxing_model(0.0);
    const StationaryResult s = stationary_alpha0(m.rates, m.geom);
    const double rate = max_rate(m.rates, m.geom);
    const EvolutionTrace t = evolve(m.rates, m.geom, s.full_rho, 100.0 / rate, 0.1 / rate);
    EXPECT_LE(max_abs(t.states.back() - s.full_rho.matrix()), 1e-9);
    EXPECT_TRUE(t.converged);
    EXPECT_DOUBLE_EQ(relaxation_rate(t), 0.0);
}

TEST(Evolve, GroundStateRelaxesToNullSpaceState) {
    const testing::RandomModel m = relaxing_model();
    const StationaryResult n = stationary_numeric(build_superoperator(m.rates, m.geom, 4), m.geom);
    const double rate = max_rate(m.rates, m.geom);
    const EvolutionTrace t = evolve(m.rates, m.geom, DensityMatrix::basis_state(4, 0), 4000.0 / rate, 0.1 / rate);
    EXPECT_TRUE(t.converged);
    EXPECT_LE(max_abs(t.states.back() - n.full_rho.matrix()), 1e-8);
    EXPECT_LE(t.trace_drift, 1e-9);
    EXPECT_GE(t.min_eigenvalue_seen, -1e-8);
    for (std::size_t k = 1; k < t.times.size(); ++k) EXPECT_GT(t.times[k], t.times[k - 1]);
}

TEST(Evolve, DarkStateIsFrozen) {
    const testing::RandomModel m = relaxing_model(0.9, 3);
    const ComplexMatrix dark = dark_basis(m.geom);
    ASSERT_EQ(dark.cols(), 1);
    const DensityMatrix rho0 = DensityMatrix::pure(embed_degenerate(dark.col(0)));
    const double rate = max_rate(m.rates, m.geom);
    const EvolutionTrace t = evolve(m.rates, m.geom, rho0, 100.0 / rate, 0.1 / rate);
    for (const ComplexMatrix& s : t.states) EXPECT_LE(max_abs(s - rho0.matrix()), 1e-10);
}

TEST(Evolve, ConvergenceBasin) {
    const testing::RandomModel m = relaxing_model();
    const Eigen::MatrixXd basis = invariant_basis(m.geom);
    const double rate = max_rate(m.rates, m.geom);
    std::mt19937_64 rng(103);
    std::vector<ComplexMatrix> finals;
    for (int k = 0; k < 20; ++k) {
        // Random state supported on the invariant block: PSD 2x2 psi/eta block plus populations.
        ComplexMatrix block = testing::random_density(rng, 2) * testing::uniform(rng, 0.0, 1.0);
        SubspaceCoordinates c;
        c.rho00 = testing::uniform(rng, 0.0, 1.0);
        c.rho11 = testing::uniform(rng, 0.0, 1.0);
        c.rho_psipsi = block(0, 0).real();
        c.rho_etaeta = block(1, 1).real();
        c.rho_psieta = block(0, 1);
        ComplexMatrix rho = assemble_state(c, m.geom);
        rho /= rho.trace().real();
        const EvolutionTrace t =
            evolve(m.rates, m.geom, DensityMatrix::from_matrix(rho), 3000.0 / rate, 0.1 / rate, {.max_samples = 10});
        finals.push_back(t.states.back());
    }
    for (std::size_t i = 0; i < finals.size(); ++i)
        for (std::size_t j = i + 1; j < finals.size(); ++j) EXPECT_LE(max_abs(finals[i] - finals[j]), 1e-7);
}

TEST(Evolve, StepHalvingConsistency) {
    const testing::RandomModel m = relaxing_model();
    const double rate = max_rate(m.rates, m.geom);
    const DensityMatrix rho0 = DensityMatrix::basis_state(4, 0);
    const EvolutionTrace coarse = evolve(m.rates, m.geom, rho0, 100.0 / rate, 0.1 / rate);
    const EvolutionTrace fine = evolve(m.rates, m.geom, rho0, 100.0 / rate, 0.05 / rate);
    EXPECT_LE(max_abs(coarse.states.back() - fine.states.back()), 1e-9);
}

TEST(Evolve, MatchesMatrixExponentialOracle) {
    const testing::RandomModel m = relaxing_model();
    const double rate = max_rate(m.rates, m.geom);
    const DensityMatrix rho0 = DensityMatrix::basis_state(4, 0);
    const double t_end = 20.0 / rate;
    const EvolutionTrace t = evolve(m.rates, m.geom, rho0, t_end, 0.02 / rate);
    const testing::KroneckerOracle oracle(m.rates, m.geom);
    EXPECT_LE(max_abs(t.states.back() - oracle.propagate(rho0.matrix(), t_end)), 1e-10);
}

TEST(Evolve, Errors) {
    const testing::RandomModel m = relaxing_model();
    const double rate = max_rate(m.rates, m.geom);
    const DensityMatrix rho0 = DensityMatrix::basis_state(4, 0);
    EXPECT_THROW(evolve(m.rates, m.geom, rho0, 1.0, 0.5 / rate), PreconditionError);
    EXPECT_THROW(evolve(m.rates, m.geom, rho0, 1.0, 0.0), DomainError);
    EXPECT_THROW(evolve(m.rates, m.geom, DensityMatrix::basis_state(3, 0), 1.0, 0.01 / rate), DomainError);
    EvolveOptions loose;
    loose.stability_bound = 1e3;
    EXPECT_THROW(evolve(m.rates, m.geom, rho0, 200.0 / rate, 20.0 / rate, loose), IntegrationQualityError);
}

TEST(RelaxationRate, TwoLevelSinkDecay) {
    const SystemSpec sys = SystemSpec::create(0.0, 1.0, 2.0, ComplexVector::Ones(1), ComplexVector::Ones(1));
    const RateSet rates = build_rates(sys, testing::reservoirs(1.0, 0.0, 1.0, 0.0, 0.8, 0.6));
    const BrightGeometry g = bright_geometry(sys);
    const double expected = 2.0 * (rates[Reservoir::sink].gp_re + rates[Reservoir::sink].gm_re);
    const double rate = max_rate(rates, g);
    const EvolutionTrace t = evolve(rates, g, DensityMatrix::basis_state(3, 1), 40.0 / expected, 0.05 / rate);
    ASSERT_TRUE(t.converged);
    EXPECT_NEAR(relaxation_rate(t), expected, 0.05 * expected);
}

TEST(RelaxationRate, BoundedBySpectrum) {
    const testing::RandomModel m = relaxing_model();
    const double rate = max_rate(m.rates, m.geom);
    const EvolutionTrace t = evolve(m.rates, m.geom, DensityMatrix::basis_state(4, 0), 4000.0 / rate, 0.1 / rate);
    const double fitted = relaxation_rate(t);

    const Eigen::MatrixXd l = build_superoperator(m.rates, m.geom, 4).matrix();
    const Eigen::VectorXcd ev = l.eigenvalues();
    double fastest = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) fastest = std::max(fastest, -ev(k).real());
    EXPECT_GT(fitted, 0.0);
    EXPECT_LE(fitted, fastest);

    // The tail is governed by the slowest nonzero mode of the invariant block.
    const Eigen::MatrixXd basis = invariant_basis(m.geom);
    const Eigen::MatrixXd restricted = basis.transpose() * l * basis;
    const Eigen::VectorXcd rev = restricted.eigenvalues();
    double slowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < rev.size(); ++k) {
        if (-rev(k).real() > 1e-9) slowest = std::min(slowest, -rev(k).real());
    }
    EXPECT_NEAR(fitted, slowest, 0.05 * slowest);
}

TEST(RelaxationRate, Errors) {
    EvolutionTrace t;
    EXPECT_THROW(relaxation_rate(t), FitError);
}

}  // namespace
}  // namespace qtransport
