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

#include "qrobust/model_io.hpp"

#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qrobust/channel.hpp"
#include "qrobust/qasm.hpp"

namespace qrobust {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw FileError("error while reading '" + path.string() + "'");
    return ss.str();
}

void write_text_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / (path.filename().string() + ".tmp-" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FileError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw FileError("error while writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw FileError("cannot move output into place at '" + path.string() + "'");
    }
}

Json read_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(where + ": expected a number or an [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json vector_to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
    return out;
}

ComplexVector vector_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a nonempty array of complex entries");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

Json matrix_to_json(const ComplexMatrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    ComplexMatrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const ComplexVector row =
            vector_from_json(j[static_cast<std::size_t>(r)], where + "[" + std::to_string(r) + "]");
        if (r == 0) m.resize(rows, row.size());
        if (row.size() != m.cols()) throw SchemaError(where + ": rows have different lengths");
        m.row(r) = row.transpose();
    }
    return m;
}

namespace {

std::vector<int> int_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array of integers");
    std::vector<int> out;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw SchemaError(where + ": expected an array of integers");
        out.push_back(x.get<int>());
    }
    return out;
}

}  // namespace

Measurement measurement_from_json(const Json& j, int n_qubits, const std::vector<int>& default_measured) {
    if (!j.is_object()) throw SchemaError("model config: expected a JSON object");
    std::vector<int> measured =
        j.contains("measured_qubits") ? int_list(j["measured_qubits"], "measured_qubits") : default_measured;
    if (measured.empty()) throw SchemaError("model config: no measured qubits");
    if (!j.contains("measurement")) return Measurement::computational(n_qubits, measured);
    const Json& mj = j["measurement"];
    if (!mj.is_object() || !mj.contains("labels") || !mj.contains("operators"))
        throw SchemaError("measurement: expected an object with \"labels\" and \"operators\"");
    if (!mj["labels"].is_array() || !mj["operators"].is_array())
        throw SchemaError("measurement: \"labels\" and \"operators\" must be arrays");
    std::vector<std::string> labels;
    for (const auto& l : mj["labels"]) {
        if (!l.is_string()) throw SchemaError("measurement.labels: expected strings");
        labels.push_back(l.get<std::string>());
    }
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < mj["operators"].size(); ++i)
        ops.push_back(matrix_from_json(mj["operators"][i], "measurement.operators[" + std::to_string(i) + "]"));
    return Measurement::make(n_qubits, std::move(measured), std::move(labels), std::move(ops));
}

Json measurement_to_json(const Measurement& m) {
    Json ops = Json::array();
    for (const auto& op : m.operators()) ops.push_back(matrix_to_json(op));
    return Json{{"measured_qubits", m.measured_qubits()},
                {"measurement", Json{{"labels", m.labels()}, {"operators", std::move(ops)}}}};
}

fs::path default_config_path(const fs::path& qasm_path) {
    fs::path p = qasm_path;
    p.replace_extension(".json");
    return p;
}

QmlModel load_model(const fs::path& qasm_path, const fs::path& config_path) {
    const QasmProgram prog = parse_qasm_program(read_text_file(qasm_path));
    fs::path cfg = config_path;
    if (cfg.empty()) {
        cfg = default_config_path(qasm_path);
        if (!fs::exists(cfg)) {
            if (prog.measured_qubits.empty())
                throw SchemaError(qasm_path.string() + ": no measure statements and no model config sidecar");
            return QmlModel(prog.circuit, Measurement::computational(prog.circuit.n_qubits(), prog.measured_qubits));
        }
    }
    Measurement m = measurement_from_json(read_json_file(cfg), prog.circuit.n_qubits(), prog.measured_qubits);
    return QmlModel(prog.circuit, std::move(m));
}

std::string_view to_string(StateKind k) { return k == StateKind::pure ? "pure" : "mixed"; }

StateKind parse_state_kind(std::string_view text) {
    if (text == "pure") return StateKind::pure;
    if (text == "mixed") return StateKind::mixed;
    throw InputError("state kind must be pure or mixed, got '" + std::string(text) + "'");
}

Dataset dataset_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("dataset: expected a JSON object");
    for (const char* key : {"n_qubits", "state_kind", "states", "labels"})
        if (!j.contains(key)) throw SchemaError(std::string("dataset: missing field \"") + key + "\"");
    if (!j["n_qubits"].is_number_integer()) throw SchemaError("dataset.n_qubits: expected an integer");
    if (!j["state_kind"].is_string()) throw SchemaError("dataset.state_kind: expected \"pure\" or \"mixed\"");
    if (!j["states"].is_array() || !j["labels"].is_array())
        throw SchemaError("dataset: \"states\" and \"labels\" must be arrays");
    Dataset d;
    d.n_qubits = j["n_qubits"].get<int>();
    if (d.n_qubits < 1 || d.n_qubits > kDatasetQubitCap)
        throw InputError("dataset.n_qubits must lie in [1, " + std::to_string(kDatasetQubitCap) + "]");
    d.kind = parse_state_kind(j["state_kind"].get<std::string>());
    if (j["states"].size() != j["labels"].size())
        throw SchemaError("dataset: " + std::to_string(j["states"].size()) + " states but " +
                          std::to_string(j["labels"].size()) + " labels");
    if (j["states"].empty()) throw InputError("dataset: no states");
    const Eigen::Index dim = dim_of(d.n_qubits);
    for (std::size_t i = 0; i < j["states"].size(); ++i) {
        const std::string where = "dataset.states[" + std::to_string(i) + "]";
        if (d.kind == StateKind::pure) {
            ComplexVector v = vector_from_json(j["states"][i], where);
            if (v.size() != dim)
                throw DimensionError(where + ": " + std::to_string(v.size()) + " amplitudes, expected " +
                                     std::to_string(dim));
            d.states.emplace_back(PureState::from_amplitudes(std::move(v)));
        } else {
            ComplexMatrix m = matrix_from_json(j["states"][i], where);
            if (m.rows() != dim || m.cols() != dim)
                throw DimensionError(where + ": matrix is not " + std::to_string(dim) + " x " + std::to_string(dim));
            d.states.emplace_back(DensityMatrix::from_matrix(std::move(m)));
        }
        const Json& l = j["labels"][i];
        if (!l.is_string() && !l.is_number_unsigned())
            throw SchemaError("dataset.labels[" + std::to_string(i) + "]: expected a label name or index");
        d.labels.push_back(l);
    }
    return d;
}

Json dataset_to_json(const Dataset& d) {
    Json states = Json::array();
    for (const auto& s : d.states) states.push_back(state_to_json(s));
    return Json{{"n_qubits", d.n_qubits}, {"state_kind", to_string(d.kind)}, {"states", std::move(states)},
                {"labels", d.labels}};
}

Dataset load_dataset(const fs::path& path) { return dataset_from_json(read_json_file(path)); }

std::vector<LabeledState> labeled_states(const Dataset& d, const Measurement& m, StateKind as) {
    if (d.n_qubits != m.n_qubits())
        throw DimensionError("dataset has " + std::to_string(d.n_qubits) + " qubits, model has " +
                             std::to_string(m.n_qubits()));
    if (d.kind == StateKind::mixed && as == StateKind::pure)
        throw InputError("dataset holds mixed states; they cannot be verified as pure");
    std::vector<LabeledState> out;
    for (std::size_t i = 0; i < d.states.size(); ++i) {
        std::size_t label;
        const Json& l = d.labels[i];
        if (l.is_string()) {
            label = m.index_of(l.get<std::string>());
        } else {
            label = l.get<std::size_t>();
            if (label >= m.size())
                throw InputError("dataset.labels[" + std::to_string(i) + "]: index " + std::to_string(label) +
                                 " outside the measurement label set");
        }
        StateValue s = as == StateKind::mixed ? StateValue{density_of(d.states[i])} : d.states[i];
        out.push_back({std::move(s), label});
    }
    return out;
}

std::vector<NoisePlacement> noise_placements_from_json(const Json& j) {
    if (!j.is_array()) throw SchemaError("noise sidecar: expected an array of placements");
    std::vector<NoisePlacement> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "noise[" + std::to_string(i) + "]";
        const Json& e = j[i];
        if (!e.is_object() || !e.contains("position") || !e.contains("qubits"))
            throw SchemaError(where + ": expected {position, qubits, kind|kraus, p}");
        if (!e["position"].is_number_unsigned()) throw SchemaError(where + ".position: expected an index");
        std::vector<int> qubits = int_list(e["qubits"], where + ".qubits");
        if (e.contains("kraus")) {
            if (!e["kraus"].is_array()) throw SchemaError(where + ".kraus: expected an array of matrices");
            std::vector<ComplexMatrix> ks;
            for (std::size_t k = 0; k < e["kraus"].size(); ++k)
                ks.push_back(matrix_from_json(e["kraus"][k], where + ".kraus[" + std::to_string(k) + "]"));
            out.push_back({e["position"].get<std::size_t>(), std::move(qubits), validate_kraus(std::move(ks))});
        } else {
            if (!e.contains("kind") || !e["kind"].is_string() || !e.contains("p") || !e["p"].is_number())
                throw SchemaError(where + ": needs \"kraus\" or both \"kind\" and \"p\"");
            const NoiseKind kind = parse_noise_kind(e["kind"].get<std::string>());
            out.push_back({e["position"].get<std::size_t>(), std::move(qubits),
                           standard_channel(kind, e["p"].get<double>())});
        }
    }
    return out;
}

Json noise_placements_to_json(const Circuit& circuit) {
    Json out = Json::array();
    const auto& insts = circuit.instructions();
    for (std::size_t i = 0; i < insts.size(); ++i) {
        const auto* site = std::get_if<NoiseSite>(&insts[i]);
        if (site == nullptr) continue;
        Json e{{"position", i}, {"qubits", site->qubits}};
        if (site->channel.level().has_value() && site->channel.kind() != NoiseKind::custom) {
            e["kind"] = to_string(site->channel.kind());
            e["p"] = *site->channel.level();
        } else {
            Json ks = Json::array();
            for (const auto& k : site->channel.kraus()) ks.push_back(matrix_to_json(k));
            e["kraus"] = std::move(ks);
        }
        out.push_back(std::move(e));
    }
    return out;
}

Json state_to_json(const StateValue& s) {
    if (const auto* p = std::get_if<PureState>(&s)) return vector_to_json(p->amplitudes());
    return matrix_to_json(std::get<DensityMatrix>(s).matrix());
}

Json counterexamples_to_json(const DatasetReport& report, const Measurement& m) {
    Json out = Json::array();
    for (const auto& st : report.states) {
        if (!st.verdict.counterexample) continue;
        const Counterexample& ce = *st.verdict.counterexample;
        out.push_back(Json{{"index", st.index},
                           {"original_label", m.labels().at(ce.original_label)},
                           {"adversarial_label", m.labels().at(ce.adversarial_label)},
                           {"f_bar", ce.f_bar},
                           {"state_kind", std::holds_alternative<PureState>(ce.state) ? "pure" : "mixed"},
                           {"state", state_to_json(ce.state)}});
    }
    return out;
}

}  // namespace qrobust
