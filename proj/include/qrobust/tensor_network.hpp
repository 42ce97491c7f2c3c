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
#include <cstdint>
#include <utility>
#include <vector>

#include "qrobust/circuit.hpp"
#include "qrobust/global.hpp"
#include "qrobust/linalg.hpp"

namespace qrobust {

/// Dense tensor, row-major over `dims`, one integer label per axis.
struct Tensor {
    std::vector<std::int64_t> dims;
    std::vector<int> labels;
    std::vector<Complex> data;

    std::int64_t size() const;
    /// Checks rank, data length and label uniqueness.
    void validate() const;
};

/// Network of tensors. A label held by two nodes is a contracted edge; a
/// label held by one node is open. Open labels split into the row group
/// `output_labels` and the column group `input_labels`, both ordered by
/// qubit.
struct TensorNetwork {
    int n_qubits = 0;
    std::vector<Tensor> nodes;
    std::vector<int> output_labels;
    std::vector<int> input_labels;

    void validate() const;
};

/// E^dagger(M_S) as a network: the circuit tensors, their conjugate copy,
/// and M_S on the measured qubits in between. Noise sites become a pair
/// of Kraus tensors sharing an explicit Kraus index.
TensorNetwork build_heisenberg_tn(const QmlModel& model, const std::vector<std::size_t>& subset);

/// Pairwise contraction sequence over slot ids: the network's nodes are
/// slots 0..N-1 and step i creates slot N + i.
struct ContractionOrder {
    std::vector<std::pair<int, int>> steps;
    std::size_t peak_elements = 0;
    double flops = 0.0;
};

/// Greedy: repeatedly contract the connected pair whose result is smallest,
/// ties broken by flops and then by slot ids. Once no connected pair is
/// left, components are joined by outer products, smallest first.
ContractionOrder greedy_order(const std::vector<Tensor>& nodes, const std::vector<int>& open_labels);

/// Peak intermediate size and flops of a given order.
ContractionOrder evaluate_order(const std::vector<Tensor>& nodes, const std::vector<std::pair<int, int>>& steps);

/// Contracts the tensors in the given order and permutes the result axes
/// into `final_labels`.
Tensor contract(const std::vector<Tensor>& nodes, const std::vector<std::pair<int, int>>& steps,
                const std::vector<int>& final_labels);

/// Full operator as a 2^n x 2^n matrix (rows from output labels, columns
/// from input labels). For tests at small size.
ComplexMatrix contract_dense(const TensorNetwork& tn);

/// v -> E^dagger(M_S) v. The contraction order (with v attached to the
/// input legs) is planned once at construction and replayed per call.
class MatfreeOperator {
public:
    explicit MatfreeOperator(TensorNetwork tn);
    Eigen::Index dim() const { return Eigen::Index{1} << tn_.n_qubits; }
    ComplexVector apply(const ComplexVector& v) const;
    const TensorNetwork& network() const { return tn_; }
    std::size_t peak_elements() const { return order_.peak_elements; }
    double flops() const { return order_.flops; }
    std::size_t steps() const { return order_.steps.size(); }

private:
    struct Step {
        int a, b;
        std::vector<int> perm_a, perm_b;
        bool permute_a, permute_b;
        Eigen::Index m, k, n;
    };
    TensorNetwork tn_;
    std::vector<Tensor> shapes_;  // nodes plus the vector slot, data left empty for the vector
    ContractionOrder order_;
    std::vector<Step> plan_;
    std::vector<std::vector<std::int64_t>> slot_dims_;
    std::vector<int> final_perm_;
    bool final_permute_ = false;
};

ComplexVector matfree_apply(const TensorNetwork& tn, const ComplexVector& v);

struct TnOptions {
    double tol = 1e-6;
    int max_iter = 2000;
    int restart_dim = 40;
    std::uint64_t seed = 20240917;
};

/// K* through matrix-free Lanczos on every label subset.
LipschitzResult lipschitz_tn(const QmlModel& model, const TnOptions& opts = {});

}  // namespace qrobust
