// Copyright 2026 The qrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrobust/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qrobust/errors.hpp"

namespace qrobust {

int qubits_of(Eigen::Index dim) {
    if (dim <= 0 || (dim & (dim - 1)) != 0) return -1;
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    return n;
}

double hermiticity_residual(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && m.size() > 0 && hermiticity_residual(m) <= tol;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
    // Symmetrize so round-off in the input does not leak into the solver.
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    auto eig = hermitian_eigen(m);
    RealVector roots(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        double v = eig.values[i];
        if (v < -kPsdTol) {
            std::ostringstream msg;
            msg << "matrix is not positive semi-definite (eigenvalue " << v << ")";
            throw InputError(msg.str());
        }
        roots[i] = std::sqrt(std::max(v, 0.0));
    }
    return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ---------------------------------------------------------------------------

PureState PureState::from_amplitudes(ComplexVector amplitudes) {
    int n = qubits_of(amplitudes.size());
    if (n < 1) throw DimensionError("state vector length must be 2^n with n >= 1");
    if (!amplitudes.allFinite()) throw InputError("state vector has non-finite entries");
    double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol) {
        std::ostringstream msg;
        msg << "state vector is not normalized (squared norm " << norm2 << ")";
        throw InputError(msg.str());
    }
    return PureState(n, std::move(amplitudes));
}

PureState PureState::normalized(ComplexVector amplitudes) {
    double norm = amplitudes.norm();
    if (!(norm > 0.0)) throw InputError("cannot normalize a zero vector");
    amplitudes /= norm;
    return from_amplitudes(std::move(amplitudes));
}

PureState PureState::basis(int n_qubits, std::size_t index) {
    ComplexVector v = ComplexVector::Zero(dim_of(n_qubits));
    if (static_cast<Eigen::Index>(index) >= v.size()) throw DimensionError("basis index out of range");
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return from_amplitudes(std::move(v));
}

DensityMatrix PureState::density() const {
    return DensityMatrix::assume_valid(amplitudes_ * amplitudes_.adjoint());
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
    if (m.rows() != m.cols()) throw DimensionError("density matrix must be square");
    int n = qubits_of(m.rows());
    if (n < 1) throw DimensionError("density matrix size must be 2^n with n >= 1");
    if (!m.allFinite()) throw InputError("density matrix has non-finite entries");
    double herm = hermiticity_residual(m);
    if (herm > kHermitianTol) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian (residual " << herm << ")";
        throw InputError(msg.str());
    }
    double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream msg;
        msg << "density matrix trace is " << tr << ", expected 1";
        throw InputError(msg.str());
    }
    double lmin = hermitian_eigen(m).values.minCoeff();
    if (lmin < -kPsdTol) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << lmin;
        throw InputError(msg.str());
    }
    return DensityMatrix(n, std::move(m));
}

DensityMatrix DensityMatrix::assume_valid(ComplexMatrix m) {
    int n = qubits_of(m.rows());
    if (n < 1 || m.rows() != m.cols()) throw DimensionError("density matrix size must be 2^n x 2^n");
    return DensityMatrix(n, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    auto d = dim_of(n_qubits);
    return assume_valid(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

bool DensityMatrix::is_pure(double tol) const {
    return hermitian_eigen(matrix_).values.maxCoeff() >= 1.0 - tol;
}

// ---------------------------------------------------------------------------

namespace {

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << "dimension mismatch: " << a.dim() << " vs " << b.dim();
        throw DimensionError(msg.str());
    }
}

}  // namespace

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho, sigma);
    auto eig = hermitian_eigen(rho.matrix() - sigma.matrix());
    double d = 0.5 * eig.values.cwiseAbs().sum();
    return std::clamp(d, 0.0, 1.0);
}

namespace {

// Columns sqrt(lambda_i) v_i over the numerical support, so that
// m = F F^dagger. Eigenvalues below a dimension-scaled round-off floor are
// dropped rather than square-rooted.
ComplexMatrix support_factor(const ComplexMatrix& m) {
    auto eig = hermitian_eigen(m);
    const Eigen::Index d = eig.values.size();
    const double floor =
        64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(d) * std::max(eig.values.maxCoeff(), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (eig.values[i] < -kPsdTol) throw InputError("fidelity: input is not positive semi-definite");
        if (eig.values[i] > floor) keep.push_back(i);
    }
    ComplexMatrix f(m.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        f.col(static_cast<Eigen::Index>(j)) = std::sqrt(eig.values[keep[j]]) * eig.vectors.col(keep[j]);
    return f;
}

}  // namespace

// sqrt F is the trace norm of sqrt(rho) sqrt(sigma), i.e. the sum of the
// singular values of F_rho^dagger F_sigma. Singular values avoid square
// roots of near-zero eigenvalues of sqrt(rho) sigma sqrt(rho).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho, sigma);
    const ComplexMatrix a = support_factor(rho.matrix());
    const ComplexMatrix b = support_factor(sigma.matrix());
    if (a.cols() == 0 || b.cols() == 0) return 0.0;
    const ComplexMatrix m = a.adjoint() * b;
    const double s = Eigen::JacobiSVD<ComplexMatrix>(m).singularValues().sum();
    return std::clamp(s * s, 0.0, 1.0);
}

double fidelity(const PureState& psi, const PureState& phi) {
    if (psi.dim() != phi.dim()) throw DimensionError("dimension mismatch between pure states");
    return std::clamp(std::norm(psi.amplitudes().dot(phi.amplitudes())), 0.0, 1.0);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("probability vectors differ in length");
    auto check = [](std::span<const double> v) {
        double s = 0.0;
        for (double x : v) {
            if (!std::isfinite(x) || x < -kPsdTol) throw InputError("probability vector has invalid entry");
            s += x;
        }
        if (std::abs(s - 1.0) > kTraceTol) throw InputError("probability vector does not sum to 1");
    };
    check(p);
    check(q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return std::clamp(0.5 * d, 0.0, 1.0);
}

HermitianExtremes hermitian_extremes(const ComplexMatrix& h) {
    if (!is_hermitian(h)) throw InputError("hermitian_extremes: matrix is not Hermitian");
    auto eig = hermitian_eigen(h);
    const auto last = eig.values.size() - 1;
    return {eig.values[0], eig.vectors.col(0), eig.values[last], eig.vectors.col(last)};
}

}  // namespace qrobust
