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

#include "qrobust/global.hpp"

#include <cmath>

#include "gtest/gtest.h"

#include "qrobust/errors.hpp"
#include "qrobust/noise.hpp"
#include "test_support.hpp"

using namespace qrobust;
using qrobust::oracle::Rng;

namespace {

QmlModel end_noise_model(NoiseKind kind, double p) {
    Circuit c(1);
    c.append(Gate::make("h", {0}));
    c.append(Gate::make("h", {0}));
    return QmlModel(append_noise(c, standard_channel(kind, p), {0}), Measurement::computational(1, {0}));
}

}  // namespace

TEST(lipschitz_dense, identity_model) {
    const QmlModel model(Circuit(1), Measurement::computational(1, {0}));
    const auto r = lipschitz_dense(model);
    EXPECT_NEAR(r.k_star, 1.0, 1e-12);
    EXPECT_EQ(r.witness_subset, std::vector<std::size_t>{0});
}

TEST(lipschitz_dense, closed_forms) {
    EXPECT_NEAR(lipschitz_dense(end_noise_model(NoiseKind::bit_flip, 1e-4)).k_star, 0.99980, 1e-12);
    EXPECT_NEAR(lipschitz_dense(end_noise_model(NoiseKind::depolarizing, 0.05)).k_star, 0.9333333, 1e-6);
    EXPECT_NEAR(lipschitz_dense(end_noise_model(NoiseKind::phase_flip, 0.025)).k_star, 1.0, 1e-12);
    for (double p : {0.0, 0.01, 0.2, 0.5}) {
        EXPECT_NEAR(lipschitz_dense(end_noise_model(NoiseKind::bit_flip, p)).k_star, 1 - 2 * p, 1e-12);
        EXPECT_NEAR(lipschitz_dense(end_noise_model(NoiseKind::depolarizing, p)).k_star, 1 - 4 * p / 3, 1e-12);
        EXPECT_NEAR(lipschitz_dense(end_noise_model(NoiseKind::phase_flip, p)).k_star, 1.0, 1e-12);
    }
}

TEST(global_decision, table_pattern) {
    const auto bf = lipschitz_dense(end_noise_model(NoiseKind::bit_flip, 1e-4));
    const auto yes = global_decision(bf, 0.0003, 0.0075);
    EXPECT_TRUE(yes.robust);
    EXPECT_FALSE(yes.kernel.has_value());
    const auto pf = lipschitz_dense(end_noise_model(NoiseKind::phase_flip, 0.025));
    const auto no = global_decision(pf, 0.075, 0.0003);
    EXPECT_FALSE(no.robust);
    EXPECT_TRUE(no.kernel.has_value());
    LipschitzResult zero;
    EXPECT_TRUE(global_decision(zero, 0.5, 1e-9).robust);
    EXPECT_THROW(global_decision(zero, 0.0, 0.1), InputError);
}

TEST(global_properties, contraction_and_unitary_saturation) {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto noisy = oracle::random_model(rng, {3, 8, 3, true}, 2, 3, false);
        EXPECT_LE(lipschitz_dense(noisy).k_star, 1.0 + 1e-12);
        const auto clean = oracle::random_model(rng, {3, 8, 0, true}, 1 + trial % 3, 2, true);
        EXPECT_NEAR(lipschitz_dense(clean).k_star, 1.0, 1e-9);
    }
}

TEST(global_properties, sampled_lipschitz_bound_and_tight_kernel) {
    Rng rng(2);
    for (int trial = 0; trial < 4; ++trial) {
        const auto model = oracle::random_model(rng, {2, 8, 2, true}, 1 + trial % 2, 2 + trial % 3, false);
        const auto k = lipschitz_dense(model);
        for (int s = 0; s < 1000; ++s) {
            const auto rho = oracle::random_density(rng, 2, 1 + s % 4);
            const auto sigma = oracle::random_density(rng, 2, 1 + (s / 4) % 4);
            const double d = oracle::tv(predict_distribution(model, rho), predict_distribution(model, sigma));
            ASSERT_LE(d, k.k_star * trace_distance(rho, sigma) + 1e-7);
        }
        const auto psi = PureState::normalized(k.kernel.psi).density();
        const auto phi = PureState::normalized(k.kernel.phi).density();
        const double ratio = output_distance(model, psi, phi) / trace_distance(psi, phi);
        EXPECT_NEAR(ratio, k.k_star, 1e-6);
    }
}

TEST(global_properties, binary_subsets_have_equal_gaps) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 2, true}, 1, 2, false);
        EXPECT_NEAR(subset_gap(model, {0}), subset_gap(model, {1}), 1e-10);
    }
}

TEST(global_properties, phase_flip_leaves_diagonal_models_unchanged) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        // Classical permutation circuits keep E^dagger(M) diagonal.
        Circuit c(2);
        c.append(Gate::make("x", {trial % 2}));
        c.append(Gate::make("cx", {0, 1}));
        c.append(NoiseSite{standard_channel(NoiseKind::bit_flip, 0.01 * (trial + 1)), {1}});
        const QmlModel base(c, Measurement::computational(2, {1}));
        const QmlModel pf(append_noise(c, standard_channel(NoiseKind::phase_flip, 0.3), {0, 1}),
                          Measurement::computational(2, {1}));
        EXPECT_NEAR(lipschitz_dense(base).k_star, lipschitz_dense(pf).k_star, 1e-12);
    }
}

TEST(kernel_expand, preserves_ratio) {
    Rng rng(5);
    const auto model = oracle::random_model(rng, {2, 8, 2, true}, 1, 2, false);
    const auto k = lipschitz_dense(model);
    const auto [r1, s1] = kernel_expand(k.kernel, 1.0);
    EXPECT_NEAR(trace_distance(r1, PureState::normalized(k.kernel.psi).density()), 0.0, 1e-9);
    for (double t : {1.0, 0.5, 0.2}) {
        const auto [rho, sigma] = kernel_expand(k.kernel, t);
        const double dist = trace_distance(rho, sigma);
        EXPECT_NEAR(dist, t, 1e-9);
        const double ratio = output_distance(model, rho, sigma) / dist;
        EXPECT_GE(ratio, k.k_star - 1e-6);
        EXPECT_NEAR(ratio, k.k_star, 1e-6);
    }
}

TEST(kernel_expand, degenerate_kernel) {
    AdversarialKernel k;
    k.psi = PureState::basis(1, 0).amplitudes();
    k.phi = k.psi;
    EXPECT_THROW(kernel_expand(k, 0.5), InputError);
    k.phi = PureState::basis(1, 1).amplitudes();
    EXPECT_THROW(kernel_expand(k, 0.0), InputError);
}

TEST(lipschitz_dense, caps) {
    const QmlModel big(Circuit(13), Measurement::computational(13, {0}));
    EXPECT_THROW(lipschitz_dense(big), InputError);
    EXPECT_THROW(label_subsets(11), InputError);
    EXPECT_EQ(label_subsets(3).size(), 3U);
    EXPECT_EQ(label_subsets(10).size(), 511U);
}
