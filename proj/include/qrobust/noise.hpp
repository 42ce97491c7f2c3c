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

#include <cstdint>
#include <vector>

#include "qrobust/channel.hpp"
#include "qrobust/circuit.hpp"

namespace qrobust {

/// Random noise placement. Per qubit, K ~ Poisson(site_density) draws
/// (at least one) land on uniformly chosen boundaries of that qubit's
/// wire, each with a kind drawn uniformly from `kinds` and a level drawn
/// uniformly from [p_lo, p_hi]. Each qubit uses its own generator seeded
/// from hash(seed, qubit), so the result does not depend on thread count.
struct RandomNoiseConfig {
    std::uint64_t seed = 0;
    double p_lo = 0.001;
    double p_hi = 0.01;
    double site_density = 1.0;
    std::vector<NoiseKind> kinds{NoiseKind::bit_flip, NoiseKind::phase_flip, NoiseKind::depolarizing};

    void validate() const;
};

/// Where a random site landed in the output circuit.
struct InjectedSite {
    std::size_t position;
    int qubit;
    NoiseKind kind;
    double p;
};

struct InjectionResult {
    Circuit circuit;
    std::vector<InjectedSite> sites;
};

InjectionResult inject_random_noise_detailed(const Circuit& circuit, const RandomNoiseConfig& cfg);
Circuit inject_random_noise(const Circuit& circuit, const RandomNoiseConfig& cfg);

/// Appends noise after the last instruction. A single-qubit channel gets
/// one site per listed qubit in ascending order; a k-qubit channel needs
/// exactly k qubits and yields one site.
Circuit append_noise(const Circuit& circuit, const QuantumChannel& channel, std::vector<int> qubits);

/// Explicit placement; `position` is the index the site occupies in the
/// resulting circuit.
struct NoisePlacement {
    std::size_t position;
    std::vector<int> qubits;
    QuantumChannel channel;
};

/// Inserts placements in ascending position order.
Circuit place_noise(const Circuit& circuit, std::vector<NoisePlacement> placements);

/// 64-bit mixing function used to derive per-qubit seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace qrobust
