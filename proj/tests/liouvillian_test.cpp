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

#include <random>

#include <gtest/gtest.h>

#include "qtransport/errors.hpp"
#include "qtransport/liouvillian.hpp"
#include "qtransport/stationary.hpp"
#include "qtransport/transport.hpp"
#include "test_support.hpp"

namespace qtransport {
namespace {

using testing::manual_rates;

ComplexMatrix proj(const ComplexVector& v) { return v * v.adjoint(); }

ComplexVector e(int d, int k) {
    ComplexVector v = ComplexVector::Zero(d);
    v(k) = 1.0;
    return v;
}

struct Fixture {
    BrightGeometry geom;
    ComplexVector chi;  // embedded chi~
    ComplexVector psi;
    ComplexVector eta;
};

Fixture fixture(double alpha, double norm_chi = 1.3, double norm_psi = 0.8) {
    std::mt19937_64 rng(17);
    const SystemSpec sys = testing::system_at_angle(rng, 2, alpha, norm_chi, norm_psi);
    Fixture f{bright_geometry(sys), {}, {}, {}};
    f.chi = embed_degenerate(f.geom.chi_hat);
    f.psi = embed_degenerate(f.geom.psi_hat);
    f.eta = embed_degenerate(*f.geom.eta_hat);
    return f;
}

TEST(ThetaEm, Examples) {
    const Fixture f = fixture(0.6);
    const double g = 0.7;
    const RateSet absorb_off = manual_rates(0.0, g, 0.3, 0.4, 0.2, 0.5);
    EXPECT_LE(max_abs(apply_theta_em(absorb_off, f.geom, proj(e(4, 0)))), 1e-15);

    const ComplexMatrix out = apply_theta_em(absorb_off, f.geom, proj(f.chi));
    const ComplexMatrix expected = 2.0 * g * f.geom.norm_chi_sq() * (proj(e(4, 0)) - proj(f.chi));
    EXPECT_LE(max_abs(out - expected), 1e-14);
}

TEST(ThetaPh, Examples) {
    const Fixture f = fixture(0.6);
    const double g = 0.9;
    const RateSet rates = manual_rates(0.2, 0.5, 0.0, g, 0.1, 0.3);
    EXPECT_LE(max_abs(apply_theta_ph(rates, f.geom, proj(e(4, 1)))), 1e-15);
    const ComplexMatrix expected = 2.0 * g * f.geom.norm_psi_sq() * (proj(e(4, 1)) - proj(f.psi));
    EXPECT_LE(max_abs(apply_theta_ph(rates, f.geom, proj(f.psi)) - expected), 1e-14);
    EXPECT_LE(max_abs(apply_theta_ph(rates, f.geom, proj(f.eta))), 1e-15);
}

TEST(ThetaSink, Examples) {
    const Fixture f = fixture(0.6);
    const double g = 0.4;
    const RateSet rates = manual_rates(0.2, 0.5, 0.1, 0.3, 0.0, g);
    EXPECT_LE(max_abs(apply_theta_sink(rates, proj(e(4, 0)))), 1e-15);
    EXPECT_LE(max_abs(apply_theta_sink(rates, proj(e(4, 1))) - 2.0 * g * (proj(e(4, 0)) - proj(e(4, 1)))), 1e-15);
    EXPECT_LE(max_abs(apply_theta_sink(manual_rates(0, 0, 0, 0, 0.3, 0.6), proj(f.psi))), 1e-15);
}

TEST(Generators, DimensionMismatch) {
    const Fixture f = fixture(0.6);
    const RateSet rates = manual_rates(0.2, 0.5, 0.1, 0.3, 0.1, 0.4);
    EXPECT_THROW(apply_theta_em(rates, f.geom, ComplexMatrix::Identity(3, 3)), DomainError);
    EXPECT_THROW(apply_total(rates, f.geom, ComplexMatrix::Identity(5, 5)), DomainError);
    EXPECT_THROW(build_superoperator(rates, f.geom, 5), DomainError);
}

RateSet random_rates(std::mt19937_64& rng, bool lamb) {
    RateSet r = manual_rates(testing::uniform(rng, 0, 2), testing::uniform(rng, 0.1, 3), testing::uniform(rng, 0, 2),
                             testing::uniform(rng, 0.1, 3), testing::uniform(rng, 0, 2), testing::uniform(rng, 0.1, 3));
    if (lamb) {
        for (Reservoir res : kReservoirs) {
            r[res].gp_im = testing::uniform(rng, -1, 1);
            r[res].gm_im = testing::uniform(rng, -1, 1);
        }
    }
    return r;
}

TEST(ApplyTotal, TraceHermiticityLinearity) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 120; ++k) {
        const int m = 1 + k % 4;
        const SystemSpec sys =
            SystemSpec::create(0, 1, 2, testing::random_vector(rng, m), testing::random_vector(rng, m));
        const BrightGeometry g = bright_geometry(sys);
        const RateSet rates = random_rates(rng, k % 2 == 0);
        const ComplexMatrix r1 = testing::random_hermitian(rng, g.dim());
        const ComplexMatrix r2 = testing::random_hermitian(rng, g.dim());
        const ComplexMatrix out = apply_total(rates, g, r1);
        EXPECT_LE(std::abs(out.trace()), 1e-12);
        EXPECT_LE(max_abs(out - out.adjoint()), 1e-12);
        const double a = testing::uniform(rng, -2, 2);
        const double b = testing::uniform(rng, -2, 2);
        const ComplexMatrix lin = apply_total(rates, g, a * r1 + b * r2) - a * out - b * apply_total(rates, g, r2);
        EXPECT_LE(max_abs(lin), 1e-12);
    }
}

TEST(ApplyTotal, MatchesJumpOperatorOracle) {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 40; ++k) {
        const int m = 1 + k % 3;
        const SystemSpec sys =
            SystemSpec::create(0, 1, 2, testing::random_vector(rng, m), testing::random_vector(rng, m));
        const BrightGeometry g = bright_geometry(sys);
        const RateSet rates = random_rates(rng, true);
        const testing::KroneckerOracle oracle(rates, g);
        const ComplexMatrix rho = testing::random_hermitian(rng, g.dim());
        EXPECT_LE(max_abs(apply_total(rates, g, rho) - oracle.apply(rho)), 1e-12);
    }
}

TEST(ApplyTotal, InvariantBlockIsClosed) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 50; ++k) {
        const testing::RandomModel m = testing::draw_model(rng, 3, testing::uniform(rng, 0.05, 1.5), {}, k % 2 == 0);
        const Eigen::MatrixXd basis = invariant_basis(m.geom);
        ASSERT_EQ(basis.cols(), 6);
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            const ComplexMatrix in = unvectorize(basis.col(c), m.geom.dim());
            const Eigen::VectorXd out = vectorize(apply_total(m.rates, m.geom, in));
            const Eigen::VectorXd outside = out - basis * (basis.transpose() * out);
            EXPECT_LE(outside.cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(ApplyTotal, DarkStatesAreStationary) {
    std::mt19937_64 rng(37);
    for (int k = 0; k < 30; ++k) {
        const testing::RandomModel m = testing::draw_model(rng, 3 + k % 3, testing::uniform(rng, 0.1, 1.5));
        const ComplexMatrix dark = dark_basis(m.geom);
        ASSERT_GE(dark.cols(), 1);
        for (Eigen::Index c = 0; c < dark.cols(); ++c) {
            const ComplexVector d = embed_degenerate(dark.col(c));
            EXPECT_LE(max_abs(apply_total(m.rates, m.geom, proj(d))), 1e-12);
        }
    }
}

TEST(Superoperator, ZeroRatesGiveZeroMatrix) {
    ComplexVector v = ComplexVector::Ones(1);
    const BrightGeometry g = bright_geometry(SystemSpec::create(0, 1, 2, v, v));
    const LiouvillianMatrix l = build_superoperator(RateSet{}, g, 3);
    EXPECT_EQ(l.matrix().rows(), 18);
    EXPECT_EQ(l.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Superoperator, MatchesDirectApplication) {
    std::mt19937_64 rng(41);
    const testing::RandomModel m = testing::draw_model(rng, 3, 0.8, {}, true);
    const LiouvillianMatrix l = build_superoperator(m.rates, m.geom, m.geom.dim());
    for (int k = 0; k < 20; ++k) {
        const ComplexMatrix rho = testing::random_hermitian(rng, m.geom.dim());
        EXPECT_LE(max_abs(l.apply(rho) - apply_total(m.rates, m.geom, rho)), 1e-12);
    }
}

TEST(Superoperator, VectorizationLayout) {
    ComplexMatrix m(2, 2);
    m << Complex{1, 2}, Complex{3, 4}, Complex{5, 6}, Complex{7, 8};
    const Eigen::VectorXd v = vectorize(m);
    for (int k = 0; k < 8; ++k) EXPECT_EQ(v(k), k + 1);
    EXPECT_EQ(unvectorize(v, 2), m);
    EXPECT_THROW(unvectorize(v, 3), DomainError);
}

TEST(Superoperator, RestrictedKernelIsOneDimensional) {
    std::mt19937_64 rng(43);
    const testing::RandomModel m = testing::draw_model(rng, 2, 0.9);
    const StationaryResult s = stationary_numeric(build_superoperator(m.rates, m.geom, 4), m.geom);
    ASSERT_TRUE(s.kernel.has_value());
    EXPECT_EQ(s.kernel->restricted_dim, 1);
    EXPECT_EQ(s.kernel->subspace_dim, 6);
    EXPECT_EQ(s.kernel->full_dim, 1);
    EXPECT_LE(s.kernel->leakage, 1e-12);
}

TEST(DensityMatrix, Validation) {
    EXPECT_THROW(DensityMatrix::from_matrix(ComplexMatrix::Identity(3, 3)), DomainError);
    ComplexMatrix neg = ComplexMatrix::Zero(3, 3);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix::from_matrix(neg), DomainError);
    ComplexMatrix nonherm = ComplexMatrix::Identity(3, 3) / 3.0;
    nonherm(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix::from_matrix(nonherm), DomainError);
    EXPECT_NO_THROW(DensityMatrix::from_matrix(ComplexMatrix::Identity(3, 3) / 3.0));
    const DensityMatrix p = DensityMatrix::pure(ComplexVector::Ones(4));
    EXPECT_NEAR(p.matrix().trace().real(), 1.0, 1e-15);
    EXPECT_THROW(DensityMatrix::pure(ComplexVector::Zero(3)), DomainError);
    EXPECT_EQ(DensityMatrix::basis_state(3, 1)(1, 1), Complex(1.0, 0.0));
}

}  // namespace
}  // namespace qtransport
