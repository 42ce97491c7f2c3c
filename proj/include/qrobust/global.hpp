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

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrobust/circuit.hpp"
#include "qrobust/linalg.hpp"

namespace qrobust {

/// Adversarial kernel: psi is the top and phi the bottom eigenvector of
/// the witness observable E^dagger(M_S).
struct AdversarialKernel {
    ComplexVector psi;
    ComplexVector phi;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
};

/// Greedy contraction statistics of the tensor-network engine.
struct ContractionStats {
    std::size_t nodes = 0;
    std::size_t steps = 0;
    std::size_t peak_elements = 0;
    double flops = 0.0;
    std::size_t matvecs = 0;
    std::size_t lanczos_restarts = 0;
    double max_residual = 0.0;
};

struct LipschitzResult {
    double k_star = 0.0;
    std::vector<std::size_t> witness_subset;
    AdversarialKernel kernel;
    std::string engine;
    std::optional<ContractionStats> stats;
};

struct GlobalVerdict {
    bool robust = false;
    double epsilon = 0.0;
    double delta = 0.0;
    double k_star = 0.0;
    std::optional<AdversarialKernel> kernel;
};

inline constexpr std::size_t kMaxLabels = 10;
inline constexpr int kDenseQubitCap = 12;

/// Nonempty label subsets that leave out the last label. The gap of a
/// subset equals the gap of its complement, so these cover every proper
/// subset once.
std::vector<std::vector<std::size_t>> label_subsets(std::size_t n_labels);

/// lambda_max - lambda_min of E^dagger(M_S) computed densely.
double subset_gap(const QmlModel& model, const std::vector<std::size_t>& subset);

/// K* = max_S (lambda_max - lambda_min)(E^dagger(M_S)), dense eigenproblems.
/// Refuses models above `qubit_cap` qubits.
LipschitzResult lipschitz_dense(const QmlModel& model, int qubit_cap = kDenseQubitCap);

/// robust iff delta >= K* eps; the kernel is attached when not robust.
GlobalVerdict global_decision(const LipschitzResult& k, double eps, double delta);

/// rho_t = t psi psi^dagger + (1 - t) tau, sigma_t = t phi phi^dagger + (1 - t) tau
/// with tau the midpoint of the two pure states. phi is orthogonalized
/// against psi first.
std::pair<DensityMatrix, DensityMatrix> kernel_expand(const AdversarialKernel& kernel, double t);

/// Largest tv distance of model outputs over label subsets, i.e. d(A(rho), A(sigma)).
double output_distance(const QmlModel& model, const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qrobust
