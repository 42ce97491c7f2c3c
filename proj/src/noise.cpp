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

#include "qrobust/noise.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <tuple>

#include "qrobust/errors.hpp"

namespace qrobust {

void RandomNoiseConfig::validate() const {
    if (!(p_lo >= 0.0 && p_hi <= 1.0 && p_lo <= p_hi)) {
        std::ostringstream msg;
        msg << "noise level range [" << p_lo << ", " << p_hi << "] must satisfy 0 <= lo <= hi <= 1";
        throw InputError(msg.str());
    }
    if (!(site_density > 0.0)) throw InputError("site density must be positive");
    if (kinds.empty()) throw InputError("at least one noise kind must be enabled");
    for (auto k : kinds)
        if (k == NoiseKind::custom) throw InputError("random injection only draws standard noise kinds");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

struct Draw {
    std::size_t slot;  // insert before original instruction `slot`
    int qubit;
    int order;
    NoiseKind kind;
    double p;
};

std::vector<Draw> draw_for_qubit(const Circuit& circuit, const RandomNoiseConfig& cfg, int q) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(q)));
    std::vector<std::size_t> wire;
    for (std::size_t i = 0; i < circuit.size(); ++i) {
        const auto& t = targets_of(circuit.instructions()[i]);
        if (std::find(t.begin(), t.end(), q) != t.end()) wire.push_back(i);
    }
    std::poisson_distribution<int> count_dist(cfg.site_density);
    const int k = std::max(1, count_dist(rng));
    std::uniform_int_distribution<std::size_t> boundary_dist(0, wire.size());
    std::uniform_int_distribution<std::size_t> kind_dist(0, cfg.kinds.size() - 1);
    std::uniform_real_distribution<double> level_dist(cfg.p_lo, cfg.p_hi);
    std::vector<Draw> draws;
    for (int j = 0; j < k; ++j) {
        const std::size_t b = boundary_dist(rng);
        const std::size_t slot = b == 0 ? 0 : wire[b - 1] + 1;
        const NoiseKind kind = cfg.kinds[kind_dist(rng)];
        const double p = cfg.p_lo == cfg.p_hi ? cfg.p_lo : level_dist(rng);
        draws.push_back({slot, q, j, kind, p});
    }
    return draws;
}

}  // namespace

InjectionResult inject_random_noise_detailed(const Circuit& circuit, const RandomNoiseConfig& cfg) {
    cfg.validate();
    const int n = circuit.n_qubits();
    std::vector<std::vector<Draw>> per_qubit(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (int q = 0; q < n; ++q) per_qubit[static_cast<std::size_t>(q)] = draw_for_qubit(circuit, cfg, q);

    std::vector<Draw> draws;
    for (auto& v : per_qubit) draws.insert(draws.end(), v.begin(), v.end());
    std::sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
        return std::tie(a.slot, a.qubit, a.order) < std::tie(b.slot, b.qubit, b.order);
    });

    InjectionResult result{Circuit(n), {}};
    std::size_t next = 0;
    for (std::size_t slot = 0; slot <= circuit.size(); ++slot) {
        for (; next < draws.size() && draws[next].slot == slot; ++next) {
            const auto& d = draws[next];
            result.sites.push_back({result.circuit.size(), d.qubit, d.kind, d.p});
            result.circuit.append(NoiseSite{standard_channel(d.kind, d.p), {d.qubit}});
        }
        if (slot < circuit.size()) result.circuit.append(circuit.instructions()[slot]);
    }
    return result;
}

Circuit inject_random_noise(const Circuit& circuit, const RandomNoiseConfig& cfg) {
    return inject_random_noise_detailed(circuit, cfg).circuit;
}

Circuit append_noise(const Circuit& circuit, const QuantumChannel& channel, std::vector<int> qubits) {
    Circuit out = circuit;
    if (qubits.empty()) return out;
    if (channel.n_qubits() == 1) {
        std::sort(qubits.begin(), qubits.end());
        qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
        for (int q : qubits) out.append(NoiseSite{channel, {q}});
    } else {
        if (static_cast<int>(qubits.size()) != channel.n_qubits())
            throw DimensionError("a " + std::to_string(channel.n_qubits()) + "-qubit channel needs exactly that many qubits");
        out.append(NoiseSite{channel, std::move(qubits)});
    }
    return out;
}

Circuit place_noise(const Circuit& circuit, std::vector<NoisePlacement> placements) {
    std::stable_sort(placements.begin(), placements.end(),
                     [](const NoisePlacement& a, const NoisePlacement& b) { return a.position < b.position; });
    Circuit out = circuit;
    for (auto& p : placements) {
        if (p.position > out.size()) {
            std::ostringstream msg;
            msg << "noise position " << p.position << " is past the end of a " << out.size() << "-instruction circuit";
            throw InputError(msg.str());
        }
        out.insert(p.position, NoiseSite{std::move(p.channel), std::move(p.qubits)});
    }
    return out;
}

}  // namespace qrobust
