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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qrobust {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using ProbabilityVector = std::vector<double>;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kNormTol = 1e-9;

/// 2^n for a qubit count, as a matrix dimension.
inline Eigen::Index dim_of(int n_qubits) { return Eigen::Index{1} << n_qubits; }

/// Qubit count n with 2^n == dim, or -1 when dim is not a power of two.
int qubits_of(Eigen::Index dim);

bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

/// Largest absolute entry of m - m^dagger.
double hermiticity_residual(const ComplexMatrix& m);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
    RealVector values;
    ComplexMatrix vectors;  // columns
};
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

/// Square root of a PSD matrix; eigenvalues in [-kPsdTol, 0) are clipped to
/// zero, anything more negative throws InputError.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

class DensityMatrix;

/// Normalized state vector on n qubits. Qubit 0 is the most significant bit
/// of the amplitude index.
class PureState {
public:
    /// Validates the length (power of two) and unit norm.
    static PureState from_amplitudes(ComplexVector amplitudes);
    /// Rescales to unit norm; throws on a zero vector.
    static PureState normalized(ComplexVector amplitudes);
    static PureState basis(int n_qubits, std::size_t index);

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const { return amplitudes_; }

    DensityMatrix density() const;

private:
    PureState(int n, ComplexVector a) : n_qubits_(n), amplitudes_(std::move(a)) {}
    int n_qubits_;
    ComplexVector amplitudes_;
};

/// Positive semi-definite unit-trace 2^n x 2^n matrix.
class DensityMatrix {
public:
    /// Validates Hermiticity, PSD and trace to the library tolerances.
    static DensityMatrix from_matrix(ComplexMatrix m);
    /// Wraps a matrix produced by a trace- and positivity-preserving map
    /// without re-running the eigenvalue check.
    static DensityMatrix assume_valid(ComplexMatrix m);
    static DensityMatrix maximally_mixed(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

    /// Largest eigenvalue below 1 - 1e-9 means mixed.
    bool is_pure(double tol = 1e-9) const;

private:
    DensityMatrix(int n, ComplexMatrix m) : n_qubits_(n), matrix_(std::move(m)) {}
    int n_qubits_;
    ComplexMatrix matrix_;
};

/// Trace distance D = 1/2 sum |eig(rho - sigma)|.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Uhlmann fidelity F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// |<psi|phi>|^2.
double fidelity(const PureState& psi, const PureState& phi);

/// Total variation distance 1/2 sum |p_c - q_c|.
double tv_distance(std::span<const double> p, std::span<const double> q);

struct HermitianExtremes {
    double lambda_min = 0.0;
    ComplexVector v_min;
    double lambda_max = 0.0;
    ComplexVector v_max;
};

/// Smallest and largest eigenpairs of a Hermitian matrix (dense solver).
HermitianExtremes hermitian_extremes(const ComplexMatrix& h);

}  // namespace qrobust
