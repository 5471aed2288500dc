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

#include "qtransport/liouvillian.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qtransport/errors.hpp"

namespace qtransport {

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
    if (m.rows() != m.cols() || m.rows() < 3) {
        throw DomainError("density matrix must be square with dimension >= 3");
    }
    if (!m.allFinite()) throw DomainError("density matrix has non-finite entries");
    const double herm = max_abs(m - m.adjoint());
    if (herm > kHermitianTolerance) {
        throw DomainError("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    }
    const double trace_err = std::abs(m.trace() - Complex{1.0, 0.0});
    if (trace_err > kTraceTolerance) {
        throw DomainError("density matrix trace differs from 1 by " + std::to_string(trace_err));
    }
    const double lmin = min_hermitian_eigenvalue(m);
    if (lmin < -kPositivityTolerance) {
        throw DomainError("density matrix has negative eigenvalue " + std::to_string(lmin));
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& v) {
    const double n = v.norm();
    if (n == 0.0) throw DomainError("cannot build a pure state from the zero vector");
    const ComplexVector u = v / n;
    ComplexMatrix m = u * u.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
    if (index < 0 || index >= dim) throw DomainError("basis index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(index, index) = 1.0;
    return DensityMatrix(std::move(m));
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double min_hermitian_eigenvalue(const ComplexMatrix& m) {
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

namespace {

ComplexVector unit(int dim, int index) {
    ComplexVector e = ComplexVector::Zero(dim);
    e(index) = 1.0;
    return e;
}

// Lindblad generator for one transition between the lower state `lo` and the
// upper state `hi`:
//   2 down (<hi|rho|hi> |lo><lo| - 1/2 {rho, |hi><hi|}) - i down_im [rho, |hi><hi|]
// + 2 up   (<lo|rho|lo> |hi><hi| - 1/2 {rho, |lo><lo|}) + i up_im   [rho, |lo><lo|]
ComplexMatrix transition_generator(const ComplexMatrix& rho, const ComplexVector& lo, const ComplexVector& hi,
                                   double up, double down, double up_im, double down_im) {
    const Complex i{0.0, 1.0};

    const ComplexVector rho_hi = rho * hi;
    const Eigen::RowVectorXcd hi_rho = hi.adjoint() * rho;
    const ComplexVector rho_lo = rho * lo;
    const Eigen::RowVectorXcd lo_rho = lo.adjoint() * rho;

    const Complex hi_pop = hi.dot(rho_hi);
    const Complex lo_pop = lo.dot(rho_lo);

    const ComplexMatrix rho_phi = rho_hi * hi.adjoint();
    const ComplexMatrix phi_rho = hi * hi_rho;
    const ComplexMatrix rho_plo = rho_lo * lo.adjoint();
    const ComplexMatrix plo_rho = lo * lo_rho;

    ComplexMatrix out = 2.0 * down * (hi_pop * (lo * lo.adjoint()) - 0.5 * (rho_phi + phi_rho));
    out -= i * down_im * (rho_phi - phi_rho);
    out += 2.0 * up * (lo_pop * (hi * hi.adjoint()) - 0.5 * (rho_plo + plo_rho));
    out += i * up_im * (rho_plo - plo_rho);
    return out;
}

void check_dim(const ComplexMatrix& rho, int dim) {
    if (rho.rows() != dim || rho.cols() != dim) {
        throw DomainError("matrix dimension " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                          " does not match system dimension " + std::to_string(dim));
    }
}

}  // namespace

ComplexMatrix apply_theta_em(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho) {
    const int d = geom.dim();
    check_dim(rho, d);
    const ReservoirRates& r = rates[Reservoir::em];
    return geom.norm_chi_sq() *
           transition_generator(rho, unit(d, 0), embed_degenerate(geom.chi_hat), r.gp_re, r.gm_re, r.gp_im, r.gm_im);
}

ComplexMatrix apply_theta_ph(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho) {
    const int d = geom.dim();
    check_dim(rho, d);
    const ReservoirRates& r = rates[Reservoir::ph];
    return geom.norm_psi_sq() *
           transition_generator(rho, unit(d, 1), embed_degenerate(geom.psi_hat), r.gp_re, r.gm_re, r.gp_im, r.gm_im);
}

ComplexMatrix apply_theta_sink(const RateSet& rates, const ComplexMatrix& rho) {
    if (rho.rows() != rho.cols() || rho.rows() < 2) throw DomainError("sink generator needs a square matrix");
    const int d = static_cast<int>(rho.rows());
    const ReservoirRates& r = rates[Reservoir::sink];
    return transition_generator(rho, unit(d, 0), unit(d, 1), r.gp_re, r.gm_re, r.gp_im, r.gm_im);
}

ComplexMatrix apply_total(const RateSet& rates, const BrightGeometry& geom, const ComplexMatrix& rho) {
    return apply_theta_em(rates, geom, rho) + apply_theta_ph(rates, geom, rho) + apply_theta_sink(rates, rho);
}

double max_rate(const RateSet& rates, const BrightGeometry& geom) {
    const auto& em = rates[Reservoir::em];
    const auto& ph = rates[Reservoir::ph];
    const auto& sk = rates[Reservoir::sink];
    const double relax = 2.0 * (geom.norm_chi_sq() * (em.gp_re + em.gm_re) + geom.norm_psi_sq() * (ph.gp_re + ph.gm_re) +
                                sk.gp_re + sk.gm_re);
    const double lamb = geom.norm_chi_sq() * (std::abs(em.gp_im) + std::abs(em.gm_im)) +
                        geom.norm_psi_sq() * (std::abs(ph.gp_im) + std::abs(ph.gm_im)) + std::abs(sk.gp_im) +
                        std::abs(sk.gm_im);
    return relax + lamb;
}

Eigen::VectorXd vectorize(const ComplexMatrix& m) {
    const Eigen::Index d = m.rows();
    Eigen::VectorXd v(2 * d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const Eigen::Index k = 2 * (i * d + j);
            v(k) = m(i, j).real();
            v(k + 1) = m(i, j).imag();
        }
    }
    return v;
}

ComplexMatrix unvectorize(const Eigen::VectorXd& v, int dim) {
    if (v.size() != 2 * static_cast<Eigen::Index>(dim) * dim) {
        throw DomainError("vector length does not match 2 * dim^2");
    }
    ComplexMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const Eigen::Index k = 2 * (static_cast<Eigen::Index>(i) * dim + j);
            m(i, j) = Complex{v(k), v(k + 1)};
        }
    }
    return m;
}

LiouvillianMatrix::LiouvillianMatrix(int dim, Eigen::MatrixXd matrix) : dim_(dim), matrix_(std::move(matrix)) {
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(dim) * dim;
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw DomainError("superoperator shape does not match dimension");
    }
}

ComplexMatrix LiouvillianMatrix::apply(const ComplexMatrix& rho) const {
    check_dim(rho, dim_);
    return unvectorize(matrix_ * vectorize(rho), dim_);
}

LiouvillianMatrix build_superoperator(const RateSet& rates, const BrightGeometry& geom, int dim) {
    if (dim != geom.dim()) {
        throw DomainError("superoperator dimension " + std::to_string(dim) + " does not match M + 2 = " +
                          std::to_string(geom.dim()));
    }
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(dim) * dim;
    Eigen::MatrixXd mat(n, n);
    ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const Eigen::Index k = 2 * (static_cast<Eigen::Index>(i) * dim + j);
            e(i, j) = Complex{1.0, 0.0};
            mat.col(k) = vectorize(apply_total(rates, geom, e));
            e(i, j) = Complex{0.0, 1.0};
            mat.col(k + 1) = vectorize(apply_total(rates, geom, e));
            e(i, j) = 0.0;
        }
    }
    return LiouvillianMatrix(dim, std::move(mat));
}

}  // namespace qtransport
