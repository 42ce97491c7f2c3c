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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrobust/errors.hpp"
#include "qrobust/linalg.hpp"

namespace qrobust {

enum class NoiseKind { bit_flip, phase_flip, depolarizing, mixed, custom };

std::string_view to_string(NoiseKind kind);
/// Accepts the canonical names plus the short tags (bf, pf, dc, mix) and
/// the hyphenated spellings used on the command line.
NoiseKind parse_noise_kind(std::string_view text);
/// Compact tag used in circuit diagrams: BF, PF, DC, MIX, KR.
std::string_view short_tag(NoiseKind kind);

inline constexpr double kCompletenessTol = 1e-8;

/// Max-entry norm of sum_k E_k^dagger E_k - I.
double completeness_residual(const std::vector<ComplexMatrix>& kraus);

/// A CPTP map in Kraus form on k qubits.
class QuantumChannel {
public:
    NoiseKind kind() const { return kind_; }
    /// Noise level for the standard kinds, empty for custom channels.
    std::optional<double> level() const { return level_; }
    const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return kraus_.front().rows(); }

    /// rho -> sum_k E_k rho E_k^dagger on a matrix of the channel's size.
    ComplexMatrix apply(const ComplexMatrix& rho) const;
    /// X -> sum_k E_k^dagger X E_k.
    ComplexMatrix apply_adjoint(const ComplexMatrix& x) const;

    friend QuantumChannel standard_channel(NoiseKind kind, double p);
    friend QuantumChannel validate_kraus(std::vector<ComplexMatrix> matrices);

private:
    QuantumChannel(NoiseKind kind, std::optional<double> level, std::vector<ComplexMatrix> kraus);
    NoiseKind kind_;
    std::optional<double> level_;
    std::vector<ComplexMatrix> kraus_;
    int n_qubits_;
};

/// Bit flip {sqrt(1-p) I, sqrt(p) X}, phase flip {sqrt(1-p) I, sqrt(p) Z},
/// depolarizing {sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z}, and
/// mixed = bit flip o phase flip o depolarizing at the same level (the
/// depolarizing step acts first). Zero-weight operators are dropped, so
/// p = 0 gives the single operator I.
QuantumChannel standard_channel(NoiseKind kind, double p);

/// Raised by validate_kraus; carries the measured residual.
class CompletenessError : public InputError {
public:
    CompletenessError(const std::string& what, double residual) : InputError(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Accepts a user Kraus set iff the completeness residual is <= 1e-8.
QuantumChannel validate_kraus(std::vector<ComplexMatrix> matrices);

}  // namespace qrobust
