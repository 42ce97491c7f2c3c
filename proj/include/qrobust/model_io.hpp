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

// File formats: model config sidecar, datasets, noise sidecar and the
// counterexample dump. All JSON; complex numbers are [re, im] pairs.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "qrobust/circuit.hpp"
#include "qrobust/errors.hpp"
#include "qrobust/local.hpp"
#include "qrobust/noise.hpp"

namespace qrobust {

using Json = nlohmann::json;

/// A file could not be opened, read or written.
class FileError : public InputError {
public:
    using InputError::InputError;
};

/// A JSON document parsed but does not have the expected shape.
class SchemaError : public InputError {
public:
    using InputError::InputError;
};

/// Dense dataset states are limited to this many qubits.
inline constexpr int kDatasetQubitCap = 10;

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a temporary file in the same directory and renames it over
/// `path`, so readers never see a partial file.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);
Json read_json_file(const std::filesystem::path& path);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);
Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j, const std::string& where);
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& where);

/// Sidecar {"measured_qubits": [...], "measurement": {"labels": [...],
/// "operators": [...]}}. Operators act on the measured-qubit subspace. A
/// missing "measurement" means the computational basis of the measured
/// qubits; missing "measured_qubits" falls back to `default_measured`.
Measurement measurement_from_json(const Json& j, int n_qubits, const std::vector<int>& default_measured);
Json measurement_to_json(const Measurement& m);

/// <model>.json next to <model>.qasm.
std::filesystem::path default_config_path(const std::filesystem::path& qasm_path);

/// Parses the .qasm file and its sidecar. Without a sidecar file the
/// model measures the qubits named by measure statements in the
/// computational basis.
QmlModel load_model(const std::filesystem::path& qasm_path, const std::filesystem::path& config_path);

enum class StateKind { pure, mixed };
std::string_view to_string(StateKind k);
StateKind parse_state_kind(std::string_view text);

/// {"n_qubits": n, "state_kind": "pure"|"mixed", "states": [...],
/// "labels": [...]}. Labels are label names or integer indices.
struct Dataset {
    int n_qubits = 0;
    StateKind kind = StateKind::pure;
    std::vector<StateValue> states;
    std::vector<Json> labels;
};

Dataset dataset_from_json(const Json& j);
Json dataset_to_json(const Dataset& d);
Dataset load_dataset(const std::filesystem::path& path);

/// Resolves labels against the measurement. `as` converts pure states to
/// density matrices when mixed is requested; mixed states cannot be
/// verified as pure.
std::vector<LabeledState> labeled_states(const Dataset& d, const Measurement& m, StateKind as);

/// [{"position": i, "qubits": [...], "kind": "bit_flip", "p": 0.01}, ...]
/// or with "kraus": [matrix, ...] instead of kind and p.
std::vector<NoisePlacement> noise_placements_from_json(const Json& j);
Json noise_placements_to_json(const Circuit& circuit);

Json state_to_json(const StateValue& s);
/// [{"index", "original_label", "adversarial_label", "f_bar", "state"}, ...]
Json counterexamples_to_json(const DatasetReport& report, const Measurement& m);

}  // namespace qrobust
