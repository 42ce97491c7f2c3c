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

// Generators and independent oracles shared by the unit and acceptance
// tests. Nothing here calls the library's eigensolvers.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qrobust/circuit.hpp"
#include "qrobust/linalg.hpp"

namespace qrobust::oracle {

using Rng = std::mt19937_64;

ComplexVector random_vector(Rng& rng, Eigen::Index dim);
PureState random_pure(Rng& rng, int n_qubits);
/// Random density matrix of the given rank (0 means full rank).
DensityMatrix random_density(Rng& rng, int n_qubits, int rank = 0);
ComplexMatrix random_hermitian(Rng& rng, Eigen::Index dim);
/// Haar-ish random unitary via QR of a Gaussian matrix.
ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim);

struct CircuitShape {
    int n_qubits = 2;
    int depth = 6;              // number of gate instructions
    int noise_sites = 2;        // random single-qubit standard channels
    bool two_qubit_gates = true;
};

/// Random circuit over the built-in gate set plus random noise sites.
Circuit random_circuit(Rng& rng, const CircuitShape& shape);

/// Random POVM with `labels` outcomes on `measured` qubits.
Measurement random_povm(Rng& rng, int n_qubits, std::vector<int> measured, int labels);

QmlModel random_model(Rng& rng, const CircuitShape& shape, int measured_count, int labels, bool projective);

/// Cyclic Jacobi eigenvalue iteration for Hermitian matrices, ascending.
struct JacobiResult {
    std::vector<double> values;
    ComplexMatrix vectors;
};
JacobiResult jacobi_eigen(const ComplexMatrix& h, double tol = 1e-14, int max_sweeps = 100);

/// Total variation of two distributions computed without validation.
double tv(const std::vector<double>& p, const std::vector<double>& q);

/// Fidelity of two density matrices through the Jacobi solver:
/// (sum sqrt eig(sqrt(rho) sigma sqrt(rho)))^2.
double jacobi_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Random state at fidelity >= 1 - eps from psi: psi rotated toward a
/// random orthogonal direction by an angle uniform in the allowed cap.
PureState random_nearby_pure(Rng& rng, const PureState& psi, double eps);

/// Grid oracle for 1-qubit models: min of 1 - |<psi|phi>|^2 over grid
/// states phi that the model does not classify as `label`. A coarse grid
/// around psi locates the best region and a finer grid refines it; about
/// 10^5 points in total. Returns 1 when no grid point is misclassified.
double grid_fbar_1q(const QmlModel& model, const PureState& psi, std::size_t label);

/// Best 1 - F(rho, sigma) over `samples` misclassified sigma. Each sample
/// walks a geodesic from the purification sqrt(rho) toward a random
/// direction and bisects for the first label flip; the second half of the
/// budget perturbs the best direction so far.
double sampled_fbar_mixed(Rng& rng, const QmlModel& model, const DensityMatrix& rho, std::size_t label, int samples);

/// Random OpenQASM 2.0 program over the supported grammar: optional
/// macro, constant angle expressions, broadcast, barrier and measure
/// statements. `expected` receives the hand-built circuit it denotes.
std::string random_program(Rng& rng, int n, Circuit* expected);

/// Product of embedded gate matrices of a gate-only circuit.
ComplexMatrix gate_product_unitary(const Circuit& c);

}  // namespace qrobust::oracle
