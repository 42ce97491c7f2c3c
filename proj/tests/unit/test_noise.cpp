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

#include <cmath>

#include "gtest/gtest.h"

#include "qrobust/errors.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/global.hpp"
#include "qrobust/kernels.hpp"
#include "qrobust/qasm.hpp"
#include "test_support.hpp"

using namespace qrobust;
using qrobust::oracle::Rng;

namespace {

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Circuit sample_circuit() {
    Circuit c(2);
    c.append(Gate::make("h", {0}));
    c.append(Gate::make("cx", {0, 1}));
    c.append(Gate::make("ry", {1}, {0.3}));
    c.append(Gate::make("x", {0}));
    return c;
}

std::string fingerprint(const InjectionResult& r) {
    std::string s = render_text(r.circuit);
    for (const auto& site : r.sites) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu %d %s %.17g\n", site.position, site.qubit,
                      std::string(to_string(site.kind)).c_str(), site.p);
        s += buf;
    }
    return s;
}

}  // namespace

TEST(standard_channel, bit_flip_zero_is_identity) {
    const auto ch = standard_channel(NoiseKind::bit_flip, 0.0);
    ASSERT_EQ(ch.kraus().size(), 1U);
    EXPECT_LE(max_abs(ch.kraus()[0] - ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(standard_channel, closed_forms_on_ket0) {
    EXPECT_LE(max_abs(standard_channel(NoiseKind::bit_flip, 0.1).apply(diag2(1, 0)) - diag2(0.9, 0.1)), 1e-15);
    EXPECT_LE(max_abs(standard_channel(NoiseKind::depolarizing, 0.3).apply(diag2(1, 0)) - diag2(0.8, 0.2)), 1e-15);
    EXPECT_LE(max_abs(standard_channel(NoiseKind::phase_flip, 0.3).apply(diag2(1, 0)) - diag2(1, 0)), 1e-15);
}

TEST(standard_channel, level_out_of_range) {
    EXPECT_THROW(standard_channel(NoiseKind::bit_flip, -0.1), InputError);
    EXPECT_THROW(standard_channel(NoiseKind::depolarizing, 1.5), InputError);
    EXPECT_THROW(standard_channel(NoiseKind::custom, 0.1), InputError);
}

TEST(standard_channel, mixed_is_the_sequential_composition) {
    Rng rng(1);
    const double p = 0.13;
    const auto mixed = standard_channel(NoiseKind::mixed, p);
    const auto bf = standard_channel(NoiseKind::bit_flip, p);
    const auto pf = standard_channel(NoiseKind::phase_flip, p);
    const auto dc = standard_channel(NoiseKind::depolarizing, p);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix rho = oracle::random_density(rng, 1).matrix();
        EXPECT_LE(max_abs(mixed.apply(rho) - bf.apply(pf.apply(dc.apply(rho)))), 1e-14);
    }
}

TEST(standard_channel, completeness_of_all_kinds) {
    for (auto kind : {NoiseKind::bit_flip, NoiseKind::phase_flip, NoiseKind::depolarizing, NoiseKind::mixed})
        for (double p : {0.0, 0.001, 0.25, 0.5, 1.0})
            EXPECT_LE(completeness_residual(standard_channel(kind, p).kraus()), 1e-8);
}

TEST(validate_kraus, accepts_and_rejects) {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix x = gates::pauli_x();
    EXPECT_NO_THROW(validate_kraus({std::sqrt(0.9) * i2, std::sqrt(0.1) * x}));
    try {
        validate_kraus({i2, x});
        FAIL() << "expected a completeness error";
    } catch (const CompletenessError& e) {
        EXPECT_NEAR(e.residual(), 1.0, 1e-15);
    }
    const double g = 0.2;
    ComplexMatrix a0 = diag2(1, std::sqrt(1 - g));
    ComplexMatrix a1 = ComplexMatrix::Zero(2, 2);
    a1(0, 1) = std::sqrt(g);
    const auto ad = validate_kraus({a0, a1});
    EXPECT_EQ(ad.kind(), NoiseKind::custom);
    EXPECT_FALSE(ad.level().has_value());
    EXPECT_THROW(validate_kraus({i2, ComplexMatrix::Identity(4, 4)}), DimensionError);
    EXPECT_THROW(validate_kraus({}), InputError);
}

TEST(inject_random_noise, deterministic_for_fixed_seed) {
    RandomNoiseConfig cfg;
    cfg.seed = 42;
    const auto a = inject_random_noise_detailed(sample_circuit(), cfg);
    const auto b = inject_random_noise_detailed(sample_circuit(), cfg);
    EXPECT_EQ(fingerprint(a), fingerprint(b));
    cfg.seed = 43;
    const auto c = inject_random_noise_detailed(sample_circuit(), cfg);
    EXPECT_GE(c.sites.size(), 2U);
}

TEST(inject_random_noise, independent_of_thread_count) {
    RandomNoiseConfig cfg;
    cfg.seed = 5;
    cfg.site_density = 2.5;
    Circuit wide(8);
    for (int q = 0; q < 8; ++q) wide.append(Gate::make("h", {q}));
    kernels::set_thread_count(1);
    const auto a = inject_random_noise_detailed(wide, cfg);
    kernels::set_thread_count(4);
    const auto b = inject_random_noise_detailed(wide, cfg);
    kernels::set_thread_count(0);
    EXPECT_EQ(fingerprint(a), fingerprint(b));
}

TEST(inject_random_noise, preserves_gates_and_order) {
    Rng rng(2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Circuit c = oracle::random_circuit(rng, {3, 10, 0, true});
        RandomNoiseConfig cfg;
        cfg.seed = seed;
        cfg.site_density = 1.5;
        const auto r = inject_random_noise_detailed(c, cfg);
        Circuit gates_only(3);
        for (const auto& inst : r.circuit.instructions())
            if (std::holds_alternative<Gate>(inst)) gates_only.append(inst);
        EXPECT_TRUE(same_instructions(gates_only, c));
        EXPECT_EQ(r.circuit.noise_count(), r.sites.size());
        for (const auto& s : r.sites) {
            ASSERT_LT(s.position, r.circuit.size());
            const auto* site = std::get_if<NoiseSite>(&r.circuit.instructions()[s.position]);
            ASSERT_NE(site, nullptr);
            EXPECT_EQ(site->qubits, std::vector<int>{s.qubit});
            EXPECT_GE(s.p, cfg.p_lo);
            EXPECT_LE(s.p, cfg.p_hi);
        }
    }
}

TEST(inject_random_noise, minimum_one_site_per_qubit) {
    RandomNoiseConfig cfg;
    cfg.site_density = 1e-6;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        EXPECT_EQ(inject_random_noise_detailed(sample_circuit(), cfg).sites.size(), 2U);
    }
}

TEST(inject_random_noise, site_count_mean_over_seeds) {
    RandomNoiseConfig cfg;
    cfg.site_density = 3.0;
    double total = 0.0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        cfg.seed = static_cast<std::uint64_t>(s);
        total += static_cast<double>(inject_random_noise_detailed(sample_circuit(), cfg).sites.size());
    }
    const double mean = total / seeds;
    const double expected = cfg.site_density * 2;
    EXPECT_LE(std::abs(mean - expected), 0.1 * expected) << "mean " << mean;
}

TEST(inject_random_noise, config_validation) {
    RandomNoiseConfig cfg;
    cfg.p_lo = 0.5;
    cfg.p_hi = 0.1;
    EXPECT_THROW(inject_random_noise(sample_circuit(), cfg), InputError);
    cfg = {};
    cfg.site_density = 0.0;
    EXPECT_THROW(inject_random_noise(sample_circuit(), cfg), InputError);
    cfg = {};
    cfg.kinds.clear();
    EXPECT_THROW(inject_random_noise(sample_circuit(), cfg), InputError);
}

TEST(append_noise, end_of_circuit_examples) {
    const Circuit c = append_noise(Circuit(1), standard_channel(NoiseKind::bit_flip, 0.01), {0});
    const auto out = apply_circuit(c, PureState::basis(1, 0).density());
    EXPECT_LE(max_abs(out.matrix() - diag2(0.99, 0.01)), 1e-15);

    const Circuit base = sample_circuit();
    EXPECT_TRUE(same_instructions(append_noise(base, standard_channel(NoiseKind::bit_flip, 0.01), {}), base));

    const Circuit many = append_noise(base, standard_channel(NoiseKind::phase_flip, 0.02), {1, 0});
    ASSERT_EQ(many.size(), base.size() + 2);
    EXPECT_EQ(targets_of(many.instructions()[base.size()]), std::vector<int>{0});
    EXPECT_EQ(targets_of(many.instructions()[base.size() + 1]), std::vector<int>{1});
}

TEST(append_noise, depolarizing_lipschitz_constant) {
    Circuit c(1);
    c.append(Gate::make("h", {0}));
    c.append(Gate::make("h", {0}));
    const QmlModel model(append_noise(c, standard_channel(NoiseKind::depolarizing, 0.05), {0}),
                         Measurement::computational(1, {0}));
    EXPECT_NEAR(lipschitz_dense(model).k_star, 0.9333333, 1e-6);
}

TEST(append_noise, zero_level_channel_changes_nothing) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 1, true}, 1, 2, false);
        for (auto kind : {NoiseKind::bit_flip, NoiseKind::phase_flip, NoiseKind::depolarizing, NoiseKind::mixed}) {
            const QmlModel noisy(append_noise(model.circuit(), standard_channel(kind, 0.0), {0, 1}), model.measurement());
            const auto rho = oracle::random_density(rng, 2);
            const auto p = predict_distribution(model, rho);
            const auto q = predict_distribution(noisy, rho);
            for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-10);
        }
    }
}

TEST(place_noise, positions_index_the_result) {
    const Circuit base = sample_circuit();
    std::vector<NoisePlacement> ps;
    ps.push_back({0, {1}, standard_channel(NoiseKind::bit_flip, 0.1)});
    ps.push_back({3, {0}, standard_channel(NoiseKind::depolarizing, 0.2)});
    const Circuit out = place_noise(base, ps);
    ASSERT_EQ(out.size(), base.size() + 2);
    EXPECT_TRUE(std::holds_alternative<NoiseSite>(out.instructions()[0]));
    EXPECT_TRUE(std::holds_alternative<NoiseSite>(out.instructions()[3]));
    std::vector<NoisePlacement> bad;
    bad.push_back({99, {0}, standard_channel(NoiseKind::bit_flip, 0.1)});
    EXPECT_THROW(place_noise(base, bad), InputError);
}
