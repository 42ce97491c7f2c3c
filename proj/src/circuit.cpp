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

#include "qrobust/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrobust/errors.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/kernels.hpp"

namespace qrobust {

namespace {

void check_targets(std::span<const int> qubits, int n_qubits, const char* what) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0 || qubits[i] >= n_qubits) {
            std::ostringstream msg;
            msg << what << ": qubit index " << qubits[i] << " out of range for " << n_qubits << " qubit(s)";
            throw DimensionError(msg.str());
        }
        for (std::size_t j = 0; j < i; ++j)
            if (qubits[i] == qubits[j]) throw InputError(std::string(what) + ": repeated qubit index");
    }
}

std::vector<int> row_bits(std::span<const int> qubits, int n) {
    std::vector<int> bits;
    bits.reserve(qubits.size());
    for (int q : qubits) bits.push_back(n - 1 - q);
    return bits;
}

std::vector<int> col_bits(std::span<const int> qubits, int n) {
    std::vector<int> bits;
    bits.reserve(qubits.size());
    for (int q : qubits) bits.push_back(2 * n - 1 - q);
    return bits;
}

void require_square(const ComplexMatrix& m, int n_qubits, const char* what) {
    if (m.rows() != dim_of(n_qubits) || m.cols() != dim_of(n_qubits)) {
        std::ostringstream msg;
        msg << what << ": expected a " << dim_of(n_qubits) << "x" << dim_of(n_qubits) << " matrix, got " << m.rows()
            << "x" << m.cols();
        throw DimensionError(msg.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------

namespace {

void require_distinct(const std::string& name, const std::vector<int>& qubits) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0) throw InputError("gate '" + name + "': negative qubit index");
        for (std::size_t j = 0; j < i; ++j)
            if (qubits[i] == qubits[j])
                throw InputError("gate '" + name + "': qubit " + std::to_string(qubits[i]) + " repeated");
    }
}

}  // namespace

Gate Gate::make(std::string name, std::vector<int> qubits, std::vector<double> params) {
    const auto* info = gates::lookup(name);
    if (info == nullptr) throw InputError("unknown gate '" + name + "'");
    if (static_cast<int>(qubits.size()) != info->arity)
        throw InputError("gate '" + name + "' acts on " + std::to_string(info->arity) + " qubit(s), got " +
                         std::to_string(qubits.size()));
    require_distinct(name, qubits);
    ComplexMatrix m = gates::matrix_of(name, params);
    return Gate{std::move(name), std::move(qubits), std::move(params), std::move(m)};
}

Gate Gate::custom(std::string name, std::vector<int> qubits, ComplexMatrix unitary, std::vector<double> params) {
    if (unitary.rows() != unitary.cols() || unitary.rows() != dim_of(static_cast<int>(qubits.size())))
        throw DimensionError("gate '" + name + "': matrix size does not match qubit count");
    require_distinct(name, qubits);
    const auto d = unitary.rows();
    double err = (unitary.adjoint() * unitary - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > 1e-9) {
        std::ostringstream msg;
        msg << "gate '" << name << "' is not unitary (residual " << err << ")";
        throw InputError(msg.str());
    }
    return Gate{std::move(name), std::move(qubits), std::move(params), std::move(unitary)};
}

const std::vector<int>& targets_of(const Instruction& inst) {
    return std::visit([](const auto& x) -> const std::vector<int>& { return x.qubits; }, inst);
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw InputError("circuit needs at least one qubit");
}

std::size_t Circuit::noise_count() const {
    return static_cast<std::size_t>(std::count_if(instructions_.begin(), instructions_.end(),
                                                  [](const Instruction& i) { return std::holds_alternative<NoiseSite>(i); }));
}

void Circuit::validate(const Instruction& inst) const {
    if (const auto* g = std::get_if<Gate>(&inst)) {
        check_targets(g->qubits, n_qubits_, "gate");
        if (g->matrix.rows() != dim_of(static_cast<int>(g->qubits.size())))
            throw DimensionError("gate matrix does not match its qubit count");
    } else {
        const auto& s = std::get<NoiseSite>(inst);
        check_targets(s.qubits, n_qubits_, "noise site");
        if (s.channel.n_qubits() != static_cast<int>(s.qubits.size()))
            throw DimensionError("noise channel size does not match its qubit count");
    }
}

void Circuit::append(Instruction inst) {
    validate(inst);
    instructions_.push_back(std::move(inst));
}

void Circuit::insert(std::size_t position, Instruction inst) {
    if (position > instructions_.size()) throw InputError("insert position past the end of the circuit");
    validate(inst);
    instructions_.insert(instructions_.begin() + static_cast<std::ptrdiff_t>(position), std::move(inst));
}

bool same_instructions(const Circuit& a, const Circuit& b) {
    if (a.n_qubits() != b.n_qubits() || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a.instructions()[i];
        const auto& y = b.instructions()[i];
        if (x.index() != y.index()) return false;
        if (const auto* g = std::get_if<Gate>(&x)) {
            const auto& h = std::get<Gate>(y);
            if (g->name != h.name || g->qubits != h.qubits || g->params != h.params) return false;
        } else {
            const auto& s = std::get<NoiseSite>(x);
            const auto& t = std::get<NoiseSite>(y);
            if (s.qubits != t.qubits || s.channel.kind() != t.channel.kind() ||
                s.channel.level() != t.channel.level() || s.channel.kraus().size() != t.channel.kraus().size())
                return false;
            for (std::size_t k = 0; k < s.channel.kraus().size(); ++k)
                if (s.channel.kraus()[k] != t.channel.kraus()[k]) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

Measurement Measurement::make(int n_qubits, std::vector<int> measured_qubits, std::vector<std::string> labels,
                              std::vector<ComplexMatrix> operators) {
    if (n_qubits < 1) throw InputError("measurement needs at least one qubit");
    if (measured_qubits.empty()) throw InputError("measurement must act on at least one qubit");
    check_targets(measured_qubits, n_qubits, "measurement");
    if (labels.size() != operators.size()) throw InputError("measurement: label and operator counts differ");
    if (labels.size() < 2) throw InputError("measurement needs at least two outcomes");
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (labels[i] == labels[j]) throw InputError("measurement: duplicate label '" + labels[i] + "'");
    const auto d = dim_of(static_cast<int>(measured_qubits.size()));
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t c = 0; c < operators.size(); ++c) {
        const auto& m = operators[c];
        if (m.rows() != d || m.cols() != d)
            throw DimensionError("measurement operator '" + labels[c] + "' does not match the measured qubits");
        if (!is_hermitian(m)) throw InputError("measurement operator '" + labels[c] + "' is not Hermitian");
        if (hermitian_eigen(m).values.minCoeff() < -kPsdTol)
            throw InputError("measurement operator '" + labels[c] + "' is not positive semi-definite");
        sum += m;
    }
    double residual = (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (residual > 1e-8) {
        std::ostringstream msg;
        msg << "measurement operators do not sum to the identity (residual " << residual << ")";
        throw InputError(msg.str());
    }
    Measurement m;
    m.n_qubits_ = n_qubits;
    m.measured_ = std::move(measured_qubits);
    m.labels_ = std::move(labels);
    m.operators_ = std::move(operators);
    return m;
}

Measurement Measurement::computational(int n_qubits, std::vector<int> measured_qubits) {
    const auto d = dim_of(static_cast<int>(measured_qubits.size()));
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index i = 0; i < d; ++i) {
        ComplexMatrix p = ComplexMatrix::Zero(d, d);
        p(i, i) = 1.0;
        ops.push_back(std::move(p));
        labels.push_back(std::to_string(i));
    }
    return make(n_qubits, std::move(measured_qubits), std::move(labels), std::move(ops));
}

ComplexMatrix Measurement::local_subset_operator(std::span<const std::size_t> subset) const {
    const auto d = operators_.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (auto c : subset) {
        if (c >= operators_.size()) throw InputError("label index out of range");
        sum += operators_[c];
    }
    return sum;
}

ComplexMatrix Measurement::full_operator(std::size_t label) const {
    const std::size_t one[] = {label};
    return full_subset_operator(one);
}

ComplexMatrix Measurement::full_subset_operator(std::span<const std::size_t> subset) const {
    return embed_operator(local_subset_operator(subset), measured_, n_qubits_);
}

std::size_t Measurement::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InputError("unknown label '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

QmlModel::QmlModel(Circuit circuit, Measurement measurement)
    : circuit_(std::move(circuit)), measurement_(std::move(measurement)) {
    if (circuit_.n_qubits() != measurement_.n_qubits())
        throw DimensionError("circuit has " + std::to_string(circuit_.n_qubits()) + " qubits but measurement has " +
                             std::to_string(measurement_.n_qubits()));
}

// ---------------------------------------------------------------------------

ComplexMatrix embed_operator(const ComplexMatrix& local, std::span<const int> qubits, int n_qubits) {
    check_targets(qubits, n_qubits, "embed");
    const auto d = dim_of(n_qubits);
    ComplexMatrix full = ComplexMatrix::Identity(d, d);
    left_multiply(full, local, qubits, n_qubits);
    return full;
}

ComplexMatrix reduced_density_matrix(const ComplexMatrix& rho, std::span<const int> keep, int n_qubits) {
    check_targets(keep, n_qubits, "partial trace");
    require_square(rho, n_qubits, "partial trace");
    const int m = static_cast<int>(keep.size());
    std::vector<int> traced;
    for (int q = 0; q < n_qubits; ++q)
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
    auto index = [&](std::size_t a, std::size_t t) {
        std::size_t idx = 0;
        for (int i = 0; i < m; ++i)
            if ((a >> (m - 1 - i)) & 1U) idx |= std::size_t{1} << (n_qubits - 1 - keep[static_cast<std::size_t>(i)]);
        const int r = static_cast<int>(traced.size());
        for (int i = 0; i < r; ++i)
            if ((t >> (r - 1 - i)) & 1U) idx |= std::size_t{1} << (n_qubits - 1 - traced[static_cast<std::size_t>(i)]);
        return static_cast<Eigen::Index>(idx);
    };
    const std::size_t dk = std::size_t{1} << m;
    const std::size_t dt = std::size_t{1} << traced.size();
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t a = 0; a < dk; ++a)
        for (std::size_t b = 0; b < dk; ++b) {
            Complex s{0.0, 0.0};
            for (std::size_t t = 0; t < dt; ++t) s += rho(index(a, t), index(b, t));
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
        }
    return out;
}

void left_multiply(ComplexMatrix& m, const ComplexMatrix& u, std::span<const int> qubits, int n_qubits) {
    require_square(m, n_qubits, "left_multiply");
    // Column-major storage: row bits are the low n bits of the linear index.
    kernels::apply_local({m.data(), static_cast<std::size_t>(m.size())}, u, row_bits(qubits, n_qubits));
}

void right_multiply(ComplexMatrix& m, const ComplexMatrix& b, std::span<const int> qubits, int n_qubits) {
    require_square(m, n_qubits, "right_multiply");
    const ComplexMatrix bt = b.transpose();
    kernels::apply_local({m.data(), static_cast<std::size_t>(m.size())}, bt, col_bits(qubits, n_qubits));
}

void apply_to_vector(ComplexVector& v, const ComplexMatrix& u, std::span<const int> qubits, int n_qubits) {
    if (v.size() != dim_of(n_qubits)) throw DimensionError("apply_to_vector: length mismatch");
    kernels::apply_local({v.data(), static_cast<std::size_t>(v.size())}, u, row_bits(qubits, n_qubits));
}

DensityMatrix apply_circuit(const Circuit& circuit, const DensityMatrix& rho) {
    const int n = circuit.n_qubits();
    require_square(rho.matrix(), n, "apply_circuit");
    ComplexMatrix state = rho.matrix();
    for (const auto& inst : circuit.instructions()) {
        if (const auto* g = std::get_if<Gate>(&inst)) {
            left_multiply(state, g->matrix, g->qubits, n);
            right_multiply(state, g->matrix.adjoint(), g->qubits, n);
        } else {
            const auto& site = std::get<NoiseSite>(inst);
            ComplexMatrix acc = ComplexMatrix::Zero(state.rows(), state.cols());
            for (const auto& e : site.channel.kraus()) {
                ComplexMatrix term = state;
                left_multiply(term, e, site.qubits, n);
                right_multiply(term, e.adjoint(), site.qubits, n);
                acc += term;
            }
            state = std::move(acc);
        }
    }
    return DensityMatrix::assume_valid(std::move(state));
}

ComplexMatrix adjoint_apply(const Circuit& circuit, const ComplexMatrix& observable) {
    const int n = circuit.n_qubits();
    require_square(observable, n, "adjoint_apply");
    if (!is_hermitian(observable)) throw InputError("adjoint_apply: observable is not Hermitian");
    ComplexMatrix obs = observable;
    const auto& insts = circuit.instructions();
    for (auto it = insts.rbegin(); it != insts.rend(); ++it) {
        if (const auto* g = std::get_if<Gate>(&*it)) {
            left_multiply(obs, g->matrix.adjoint(), g->qubits, n);
            right_multiply(obs, g->matrix, g->qubits, n);
        } else {
            const auto& site = std::get<NoiseSite>(*it);
            ComplexMatrix acc = ComplexMatrix::Zero(obs.rows(), obs.cols());
            for (const auto& e : site.channel.kraus()) {
                ComplexMatrix term = obs;
                left_multiply(term, e.adjoint(), site.qubits, n);
                right_multiply(term, e, site.qubits, n);
                acc += term;
            }
            obs = std::move(acc);
        }
    }
    return obs;
}

ComplexMatrix circuit_unitary(const Circuit& circuit) {
    const int n = circuit.n_qubits();
    ComplexMatrix u = ComplexMatrix::Identity(dim_of(n), dim_of(n));
    for (const auto& inst : circuit.instructions()) {
        const auto* g = std::get_if<Gate>(&inst);
        if (g == nullptr) throw InputError("circuit_unitary: circuit contains noise");
        left_multiply(u, g->matrix, g->qubits, n);
    }
    return u;
}

namespace {

ProbabilityVector clip_distribution(std::vector<double> p) {
    double sum = 0.0;
    for (double& x : p) {
        if (!std::isfinite(x) || x < -1e-9 || x > 1.0 + 1e-9) {
            std::ostringstream msg;
            msg << "outcome probability " << x << " is outside [0, 1] beyond tolerance";
            throw Error(msg.str());
        }
        x = std::clamp(x, 0.0, 1.0);
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg << "outcome probabilities sum to " << sum;
        throw Error(msg.str());
    }
    return p;
}

}  // namespace

ProbabilityVector predict_distribution(const QmlModel& model, const DensityMatrix& rho) {
    const auto& meas = model.measurement();
    const DensityMatrix out = apply_circuit(model.circuit(), rho);
    const ComplexMatrix reduced = reduced_density_matrix(out.matrix(), meas.measured_qubits(), model.n_qubits());
    std::vector<double> p;
    p.reserve(meas.size());
    for (const auto& m : meas.operators()) p.push_back((m.cwiseProduct(reduced.transpose())).sum().real());
    return clip_distribution(std::move(p));
}

ProbabilityVector predict_distribution(const QmlModel& model, const PureState& psi) {
    return predict_distribution(model, psi.density());
}

std::size_t argmax_label(std::span<const double> p) {
    if (p.empty()) throw InputError("empty distribution");
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return best;
}

std::size_t classify(const QmlModel& model, const DensityMatrix& rho) {
    return argmax_label(predict_distribution(model, rho));
}

std::size_t classify(const QmlModel& model, const PureState& psi) {
    return argmax_label(predict_distribution(model, psi));
}

std::vector<ComplexMatrix> heisenberg_observables(const QmlModel& model) {
    std::vector<ComplexMatrix> out;
    for (std::size_t c = 0; c < model.measurement().size(); ++c)
        out.push_back(adjoint_apply(model.circuit(), model.measurement().full_operator(c)));
    return out;
}

}  // namespace qrobust
