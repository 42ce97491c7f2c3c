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

#include <string>
#include <string_view>
#include <vector>

#include "qrobust/circuit.hpp"
#include "qrobust/errors.hpp"

namespace qrobust {

/// Parse failure with a 1-based source position.
class QasmError : public InputError {
public:
    QasmError(const std::string& message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Result of reading an OpenQASM 2.0 source. `measured_qubits` lists the
/// qubits named by measure statements in first-seen order.
struct QasmProgram {
    std::string version;
    std::string qreg_name;
    Circuit circuit;
    std::vector<int> measured_qubits;
};

/// Supported subset: one qreg, any cregs, the built-in gates x y z h s sdg
/// t tdg rx ry rz u1 u2 u3 cx cz ccx swap (plus id, U, CX), gate macros
/// (inlined), barrier (ignored) and measure. if, reset and opaque are
/// rejected by name. Angles are constant expressions over + - * / and pi.
QasmProgram parse_qasm_program(std::string_view source);
Circuit parse_qasm(std::string_view source);

/// Flat OpenQASM 2.0 text for the gates of a circuit. Noise sites have no
/// OpenQASM form and are skipped; angles are written with 17 significant
/// digits so they read back bit-identically.
std::string serialize_qasm(const Circuit& circuit, const std::vector<int>& measured_qubits = {});

/// One text row per qubit, one column per instruction, plus a trailing
/// measurement column when measured qubits are given.
std::string render_text(const Circuit& circuit, const std::vector<int>& measured_qubits = {});

}  // namespace qrobust
