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

#include "qrobust/global.hpp"

#include <cmath>

#include "qrobust/errors.hpp"

namespace qrobust {

std::vector<std::vector<std::size_t>> label_subsets(std::size_t n_labels) {
    if (n_labels < 2) throw InputError("a measurement needs at least two outcomes");
    if (n_labels > kMaxLabels)
        throw InputError("K* enumerates label subsets and supports at most " + std::to_string(kMaxLabels) +
                         " labels, got " + std::to_string(n_labels));
    std::vector<std::vector<std::size_t>> out;
    const std::size_t free = n_labels - 1;
    for (std::size_t mask = 1; mask < (std::size_t{1} << free); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < free; ++i)
            if (mask >> i & 1U) s.push_back(i);
        out.push_back(std::move(s));
    }
    return out;
}

double subset_gap(const QmlModel& model, const std::vector<std::size_t>& subset) {
    const ComplexMatrix obs = adjoint_apply(model.circuit(), model.measurement().full_subset_operator(subset));
    const auto ext = hermitian_extremes(0.5 * (obs + obs.adjoint()));
    return ext.lambda_max - ext.lambda_min;
}

LipschitzResult lipschitz_dense(const QmlModel& model, int qubit_cap) {
    if (model.n_qubits() > qubit_cap)
        throw InputError("dense K* is capped at " + std::to_string(qubit_cap) + " qubits (model has " +
                         std::to_string(model.n_qubits()) + "); use the tensor-network engine");
    const auto subsets = label_subsets(model.measurement().size());
    const auto obs = heisenberg_observables(model);
    LipschitzResult best;
    best.engine = "dense";
    best.k_star = -1.0;
    for (const auto& s : subsets) {
        ComplexMatrix m = ComplexMatrix::Zero(obs.front().rows(), obs.front().cols());
        for (std::size_t c : s) m += obs[c];
        const auto ext = hermitian_extremes(0.5 * (m + m.adjoint()));
        const double gap = ext.lambda_max - ext.lambda_min;
        if (gap > best.k_star) {
            best.k_star = gap;
            best.witness_subset = s;
            best.kernel = {ext.v_max, ext.v_min, ext.lambda_max, ext.lambda_min};
        }
    }
    best.k_star = std::max(0.0, best.k_star);
    return best;
}

GlobalVerdict global_decision(const LipschitzResult& k, double eps, double delta) {
    if (!(eps > 0.0) || !(delta > 0.0)) throw InputError("eps and delta must be positive");
    GlobalVerdict v;
    v.epsilon = eps;
    v.delta = delta;
    v.k_star = k.k_star;
    v.robust = delta >= k.k_star * eps;
    if (!v.robust) v.kernel = k.kernel;
    return v;
}

std::pair<DensityMatrix, DensityMatrix> kernel_expand(const AdversarialKernel& kernel, double t) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("kernel_expand: t must lie in (0, 1]");
    if (kernel.psi.size() != kernel.phi.size() || kernel.psi.size() < 2)
        throw DimensionError("kernel_expand: malformed kernel");
    const ComplexVector psi = kernel.psi.normalized();
    ComplexVector phi = kernel.phi - psi.dot(kernel.phi) * psi;
    if (phi.norm() < 1e-9) throw InputError("kernel_expand: degenerate kernel (psi and phi are parallel)");
    phi.normalize();
    const ComplexMatrix pp = psi * psi.adjoint();
    const ComplexMatrix ff = phi * phi.adjoint();
    const ComplexMatrix tau = 0.5 * (pp + ff);
    return {DensityMatrix::assume_valid(t * pp + (1.0 - t) * tau), DensityMatrix::assume_valid(t * ff + (1.0 - t) * tau)};
}

double output_distance(const QmlModel& model, const DensityMatrix& rho, const DensityMatrix& sigma) {
    const auto p = predict_distribution(model, rho);
    const auto q = predict_distribution(model, sigma);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return 0.5 * d;
}

}  // namespace qrobust
