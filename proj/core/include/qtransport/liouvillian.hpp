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

#include <Eigen/Dense>

#include "qtransport/model.hpp"

namespace qtransport {

/// Hermitian, unit-trace, positive semidefinite D x D matrix.
class DensityMatrix {
public:
    static constexpr double kHermitianTolerance = 1e-12;
    static constexpr double kTraceTolerance = 1e-12;
    static constexpr double kPositivityTolerance = 1e-10;

    /// Validates the matrix against the tolerances above; throws DomainError.
    static DensityMatrix from_matrix(ComplexMatrix m);
    /// |v><v| / <v|v>.
    static DensityMatrix pure(const ComplexVector& v);
    static DensityMatrix basis_state(int dim, int index);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    Complex operator()(int i, int j) const { return m_(i, j); }

private:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

double max_abs(const ComplexMatrix& m);
/// Smallest eigenvalue of the Hermitian part (m + m^dagger) / 2.
double min_hermitian_eigenvalue(const ComplexMatrix& m);

/// Light generator: pumps |0> <-> chi~ with weight |chi|^2.
ComplexMatrix apply_theta_em(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho);
/// Phonon generator: transfers psi~ <-> |1> with weight |psi|^2.
ComplexMatrix apply_theta_ph(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho);
/// Sink generator on the |1> <-> |0> transition.
ComplexMatrix apply_theta_sink(const RateSet& rates, const ComplexMatrix& rho);
/// Sum of the three generators: the right-hand side of the master equation.
ComplexMatrix apply_total(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho);

/// Sum of all relaxation and Lamb-shift rate magnitudes entering the
/// generators; an upper scale for the spectrum used to bound time steps.
double max_rate(const RateSet& rates, const BrightGeometry& geom);

/// Real vectorization of a D x D complex matrix.
///
/// Row-major over entries, each entry split into (real, imaginary):
/// v[2 * (i * D + j)] = Re m(i, j), v[2 * (i * D + j) + 1] = Im m(i, j).
Eigen::VectorXd vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const Eigen::VectorXd& v, int dim);

/// Dense real 2D^2 x 2D^2 representation of the total generator.
class LiouvillianMatrix {
public:
    LiouvillianMatrix(int dim, Eigen::MatrixXd matrix);

    int dim() const noexcept { return dim_; }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    ComplexMatrix apply(const ComplexMatrix& rho) const;

private:
    int dim_;
    Eigen::MatrixXd matrix_;
};

LiouvillianMatrix build_superoperator(const RateSet& rates, const BrightGeometry& geom, int dim);

}  // namespace qtransport
