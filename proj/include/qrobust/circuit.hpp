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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qrobust/channel.hpp"
#include "qrobust/linalg.hpp"

namespace qrobust {

/// A unitary acting on an ordered list of qubits; qubits[0] is the most
/// significant bit of the matrix index.
struct Gate {
    std::string name;
    std::vector<int> qubits;
    std::vector<double> params;
    ComplexMatrix matrix;

    /// Built-in gate by name (see gates::lookup).
    static Gate make(std::string name, std::vector<int> qubits, std::vector<double> params = {});
    /// Arbitrary unitary; rejects matrices that are not unitary to 1e-9.
    static Gate custom(std::string name, std::vector<int> qubits, ComplexMatrix unitary,
                       std::vector<double> params = {});
};

struct NoiseSite {
    QuantumChannel channel;
    std::vector<int> qubits;
};

using Instruction = std::variant<Gate, NoiseSite>;

/// Ordered gates and noise sites on n qubits. The position of a noise site
/// is its index in instructions().
class Circuit {
public:
    explicit Circuit(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    const std::vector<Instruction>& instructions() const { return instructions_; }
    std::size_t size() const { return instructions_.size(); }
    bool empty() const { return instructions_.empty(); }
    std::size_t noise_count() const;

    void append(Instruction inst);
    void append(Gate g) { append(Instruction{std::move(g)}); }
    void append(NoiseSite s) { append(Instruction{std::move(s)}); }
    void insert(std::size_t position, Instruction inst);

private:
    void validate(const Instruction& inst) const;
    int n_qubits_;
    std::vector<Instruction> instructions_;
};

const std::vector<int>& targets_of(const Instruction& inst);

/// Gate names, qubits and parameters agree exactly and noise sites carry
/// equal Kraus sets. Used to compare parse results.
bool same_instructions(const Circuit& a, const Circuit& b);

/// Labeled POVM. Operators act on the measured qubits only and are
/// extended by the identity on the remaining qubits.
class Measurement {
public:
    static Measurement make(int n_qubits, std::vector<int> measured_qubits, std::vector<std::string> labels,
                            std::vector<ComplexMatrix> operators);
    /// Projective computational-basis measurement of the given qubits,
    /// labels "0" .. "2^m - 1".
    static Measurement computational(int n_qubits, std::vector<int> measured_qubits);

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<ComplexMatrix>& operators() const { return operators_; }
    const std::vector<int>& measured_qubits() const { return measured_; }

    /// sum_{c in subset} M_c on the measured-qubit subspace.
    ComplexMatrix local_subset_operator(std::span<const std::size_t> subset) const;
    /// M_c on the full 2^n space.
    ComplexMatrix full_operator(std::size_t label) const;
    ComplexMatrix full_subset_operator(std::span<const std::size_t> subset) const;

    /// Index of a label name; throws InputError when absent.
    std::size_t index_of(const std::string& label) const;

private:
    int n_qubits_ = 0;
    std::vector<int> measured_;
    std::vector<std::string> labels_;
    std::vector<ComplexMatrix> operators_;
};

/// A = (E, {M_c}).
class QmlModel {
public:
    QmlModel(Circuit circuit, Measurement measurement);
    const Circuit& circuit() const { return circuit_; }
    const Measurement& measurement() const { return measurement_; }
    int n_qubits() const { return circuit_.n_qubits(); }

private:
    Circuit circuit_;
    Measurement measurement_;
};

/// Places a local operator on the given qubits of an n-qubit space.
ComplexMatrix embed_operator(const ComplexMatrix& local, std::span<const int> qubits, int n_qubits);

/// Partial trace keeping `keep` (in that order, most significant first).
ComplexMatrix reduced_density_matrix(const ComplexMatrix& rho, std::span<const int> keep, int n_qubits);

/// m <- U m, with U placed on `qubits` (row side).
void left_multiply(ComplexMatrix& m, const ComplexMatrix& u, std::span<const int> qubits, int n_qubits);
/// m <- m B, with B placed on `qubits` (column side).
void right_multiply(ComplexMatrix& m, const ComplexMatrix& b, std::span<const int> qubits, int n_qubits);
/// v <- U v.
void apply_to_vector(ComplexVector& v, const ComplexMatrix& u, std::span<const int> qubits, int n_qubits);

/// Schrodinger picture: gates as U rho U^dagger, noise as Kraus sums.
DensityMatrix apply_circuit(const Circuit& circuit, const DensityMatrix& rho);

/// Heisenberg picture: reverse order, U^dagger O U and sum_k E_k^dagger O E_k.
ComplexMatrix adjoint_apply(const Circuit& circuit, const ComplexMatrix& observable);

/// Product of the embedded gate unitaries; throws if the circuit has noise.
ComplexMatrix circuit_unitary(const Circuit& circuit);

/// {tr(M_c E(rho))}_c, clipped into [0, 1] within 1e-9.
ProbabilityVector predict_distribution(const QmlModel& model, const DensityMatrix& rho);
ProbabilityVector predict_distribution(const QmlModel& model, const PureState& psi);

/// Index of the largest probability; ties go to the lowest index.
std::size_t argmax_label(std::span<const double> p);
std::size_t classify(const QmlModel& model, const DensityMatrix& rho);
std::size_t classify(const QmlModel& model, const PureState& psi);

/// E^dagger(M_c) for every label, on the full space.
std::vector<ComplexMatrix> heisenberg_observables(const QmlModel& model);

}  // namespace qrobust
