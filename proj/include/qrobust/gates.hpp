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

#include <span>
#include <string_view>

#include "qrobust/linalg.hpp"

// Unitary matrices of the supported gate set. Multi-qubit gates order their
// qubits most-significant first: for cx the control is qubit 0 of the
// matrix index.
namespace qrobust::gates {

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();

ComplexMatrix rx(double theta);
ComplexMatrix ry(double theta);
ComplexMatrix rz(double theta);
ComplexMatrix u3(double theta, double phi, double lambda);

struct GateInfo {
    int arity;
    int n_params;
};

/// Shape of a named gate, or nullptr when the name is not built in.
const GateInfo* lookup(std::string_view name);

/// Matrix of a built-in gate. Throws InputError for unknown names or a
/// wrong parameter count.
ComplexMatrix matrix_of(std::string_view name, std::span<const double> params);

/// rx, ry and rz: single-qubit rotations exp(-i theta P / 2).
bool is_rotation(std::string_view name);

}  // namespace qrobust::gates
