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

#include "qrobust/channel.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "qrobust/errors.hpp"
#include "qrobust/gates.hpp"

namespace qrobust {

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::bit_flip: return "bit_flip";
        case NoiseKind::phase_flip: return "phase_flip";
        case NoiseKind::depolarizing: return "depolarizing";
        case NoiseKind::mixed: return "mixed";
        case NoiseKind::custom: return "custom";
    }
    return "custom";
}

std::string_view short_tag(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::bit_flip: return "BF";
        case NoiseKind::phase_flip: return "PF";
        case NoiseKind::depolarizing: return "DC";
        case NoiseKind::mixed: return "MIX";
        case NoiseKind::custom: return "KR";
    }
    return "KR";
}

NoiseKind parse_noise_kind(std::string_view text) {
    std::string t;
    for (char c : text) t.push_back(c == '-' || c == ' ' ? '_' : static_cast<char>(std::tolower(c)));
    if (t == "bit_flip" || t == "bitflip" || t == "bf") return NoiseKind::bit_flip;
    if (t == "phase_flip" || t == "phaseflip" || t == "pf") return NoiseKind::phase_flip;
    if (t == "depolarizing" || t == "depolarising" || t == "dc") return NoiseKind::depolarizing;
    if (t == "mixed" || t == "mix") return NoiseKind::mixed;
    if (t == "custom" || t == "kraus") return NoiseKind::custom;
    throw InputError("unknown noise kind '" + std::string(text) + "'");
}

double completeness_residual(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) return std::numeric_limits<double>::infinity();
    const auto d = kraus.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& e : kraus) sum += e.adjoint() * e;
    return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

QuantumChannel::QuantumChannel(NoiseKind kind, std::optional<double> level, std::vector<ComplexMatrix> kraus)
    : kind_(kind), level_(level), kraus_(std::move(kraus)), n_qubits_(qubits_of(kraus_.front().rows())) {}

ComplexMatrix QuantumChannel::apply(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& e : kraus_) out += e * rho * e.adjoint();
    return out;
}

ComplexMatrix QuantumChannel::apply_adjoint(const ComplexMatrix& x) const {
    ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
    for (const auto& e : kraus_) out += e.adjoint() * x * e;
    return out;
}

namespace {

void push_weighted(std::vector<ComplexMatrix>& out, double weight, const ComplexMatrix& m) {
    if (weight > 0.0) out.push_back(std::sqrt(weight) * m);
}

std::vector<ComplexMatrix> pauli_kraus(NoiseKind kind, double p) {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    std::vector<ComplexMatrix> ops;
    switch (kind) {
        case NoiseKind::bit_flip:
            push_weighted(ops, 1.0 - p, i2);
            push_weighted(ops, p, gates::pauli_x());
            break;
        case NoiseKind::phase_flip:
            push_weighted(ops, 1.0 - p, i2);
            push_weighted(ops, p, gates::pauli_z());
            break;
        case NoiseKind::depolarizing:
            push_weighted(ops, 1.0 - p, i2);
            push_weighted(ops, p / 3.0, gates::pauli_x());
            push_weighted(ops, p / 3.0, gates::pauli_y());
            push_weighted(ops, p / 3.0, gates::pauli_z());
            break;
        default: break;
    }
    return ops;
}

}  // namespace

QuantumChannel standard_channel(NoiseKind kind, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "noise level p=" << p << " is outside [0, 1]";
        throw InputError(msg.str());
    }
    if (kind == NoiseKind::custom) throw InputError("custom channels are built from Kraus operators");
    std::vector<ComplexMatrix> ops;
    if (kind == NoiseKind::mixed) {
        const auto bf = pauli_kraus(NoiseKind::bit_flip, p);
        const auto pf = pauli_kraus(NoiseKind::phase_flip, p);
        const auto dc = pauli_kraus(NoiseKind::depolarizing, p);
        for (const auto& b : bf)
            for (const auto& f : pf)
                for (const auto& d : dc) ops.push_back(b * f * d);
    } else {
        ops = pauli_kraus(kind, p);
    }
    QuantumChannel ch(kind, p, std::move(ops));
    if (completeness_residual(ch.kraus()) > kCompletenessTol)
        throw Error("internal: standard channel failed completeness");
    return ch;
}

QuantumChannel validate_kraus(std::vector<ComplexMatrix> matrices) {
    if (matrices.empty()) throw InputError("Kraus set is empty");
    const auto d = matrices.front().rows();
    if (qubits_of(d) < 1) throw DimensionError("Kraus operators must be 2^k x 2^k with k >= 1");
    for (const auto& m : matrices) {
        if (m.rows() != d || m.cols() != d) throw DimensionError("Kraus operators differ in dimension");
        if (!m.allFinite()) throw InputError("Kraus operator has non-finite entries");
    }
    const double residual = completeness_residual(matrices);
    if (residual > kCompletenessTol) {
        std::ostringstream msg;
        msg << "Kraus set violates completeness: residual " << residual << " > " << kCompletenessTol;
        throw CompletenessError(msg.str(), residual);
    }
    return QuantumChannel(NoiseKind::custom, std::nullopt, std::move(matrices));
}

}  // namespace qrobust
