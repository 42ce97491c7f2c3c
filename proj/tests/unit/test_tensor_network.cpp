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

#include "qrobust/tensor_network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "gtest/gtest.h"

#include "qrobust/errors.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/lanczos.hpp"
#include "qrobust/noise.hpp"
#include "test_support.hpp"

using namespace qrobust;
using qrobust::oracle::Rng;

namespace {

ComplexMatrix dense_reference(const QmlModel& model, const std::vector<std::size_t>& subset) {
    return adjoint_apply(model.circuit(), model.measurement().full_subset_operator(subset));
}

Tensor random_tensor(Rng& rng, std::vector<int> labels) {
    Tensor t;
    t.labels = std::move(labels);
    t.dims.assign(t.labels.size(), 2);
    const auto v = oracle::random_vector(rng, Eigen::Index{1} << t.labels.size());
    t.data.assign(v.data(), v.data() + v.size());
    return t;
}

// Random network of `n` nodes with bond dimension 2. Each internal label
// joins two nodes; `open` labels hang off random nodes.
std::vector<Tensor> random_network(Rng& rng, int n, double edge_prob, int open, std::vector<int>& open_labels) {
    std::vector<std::vector<int>> labels(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int next = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (j == i + 1 || u(rng) < edge_prob) {
                labels[static_cast<std::size_t>(i)].push_back(next);
                labels[static_cast<std::size_t>(j)].push_back(next);
                ++next;
            }
    std::uniform_int_distribution<int> pick(0, n - 1);
    open_labels.clear();
    for (int k = 0; k < open; ++k) {
        labels[static_cast<std::size_t>(pick(rng))].push_back(next);
        open_labels.push_back(next++);
    }
    std::vector<Tensor> nodes;
    for (auto& l : labels) nodes.push_back(random_tensor(rng, l));
    return nodes;
}

// Exhaustive search over all pairwise orders for the smallest peak size.
void brute_force_peak(std::vector<std::uint64_t> slots, std::size_t peak, std::size_t& best) {
    if (peak >= best) return;
    if (slots.size() == 1) {
        best = peak;
        return;
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
        for (std::size_t j = i + 1; j < slots.size(); ++j) {
            const std::uint64_t merged = slots[i] ^ slots[j];
            const std::size_t size = std::size_t{1} << std::popcount(merged);
            std::vector<std::uint64_t> next;
            for (std::size_t k = 0; k < slots.size(); ++k)
                if (k != i && k != j) next.push_back(slots[k]);
            next.push_back(merged);
            brute_force_peak(std::move(next), std::max(peak, size), best);
        }
}

std::size_t optimal_peak(const std::vector<Tensor>& nodes) {
    std::vector<std::uint64_t> masks;
    std::size_t peak = 0;
    for (const auto& t : nodes) {
        std::uint64_t m = 0;
        for (int l : t.labels) m |= std::uint64_t{1} << l;
        masks.push_back(m);
        peak = std::max(peak, static_cast<std::size_t>(t.size()));
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    brute_force_peak(masks, peak, best);
    return best;
}

// Contracts slots in plain index order, ignoring cost.
std::vector<std::pair<int, int>> naive_order(std::size_t n) {
    std::vector<std::pair<int, int>> steps;
    int acc = 0;
    for (std::size_t i = 1; i < n; ++i) {
        steps.emplace_back(acc, static_cast<int>(i));
        acc = static_cast<int>(n + i - 1);
    }
    return steps;
}

}  // namespace

TEST(heisenberg_tn, empty_circuit_is_the_measurement_operator) {
    const QmlModel model(Circuit(2), Measurement::computational(2, {0}));
    const ComplexMatrix m = contract_dense(build_heisenberg_tn(model, {0}));
    EXPECT_LE((m - model.measurement().full_subset_operator(std::vector<std::size_t>{0})).norm(), 1e-14);
}

TEST(heisenberg_tn, x_gate_flips_the_projector) {
    Circuit c(1);
    c.append(Gate::make("x", {0}));
    const QmlModel model(c, Measurement::computational(1, {0}));
    const ComplexMatrix m = contract_dense(build_heisenberg_tn(model, {0}));
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(1, 1) = 1.0;
    EXPECT_LE((m - expected).norm(), 1e-14);
}

TEST(heisenberg_tn, matches_dense_adjoint) {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto model = oracle::random_model(rng, {4, 12, 3, true}, 1 + trial % 3, 2 + trial % 3, trial % 2 == 0);
        const std::vector<std::size_t> subset{static_cast<std::size_t>(trial % 2)};
        const auto tn = build_heisenberg_tn(model, subset);
        tn.validate();
        const ComplexMatrix m = contract_dense(tn);
        ASSERT_LE((m - dense_reference(model, subset)).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
        EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(contraction_order, chain_and_star) {
    Rng rng(12);
    // Chain of seven matrices with open ends: every greedy step stays a matrix.
    std::vector<Tensor> chain;
    chain.push_back(random_tensor(rng, {100, 0}));
    for (int i = 0; i < 5; ++i) chain.push_back(random_tensor(rng, {i, i + 1}));
    chain.push_back(random_tensor(rng, {5, 101}));
    const auto order = greedy_order(chain, {100, 101});
    EXPECT_EQ(order.steps.size(), chain.size() - 1);
    EXPECT_LE(order.peak_elements, 4U);
    const Tensor full = contract(chain, order.steps, {100, 101});
    const Tensor ref = contract(chain, naive_order(chain.size()), {100, 101});
    for (std::size_t i = 0; i < full.data.size(); ++i) EXPECT_LE(std::abs(full.data[i] - ref.data[i]), 1e-12);

    // Star: the center carries five legs to five leaves with one open leg each.
    std::vector<Tensor> star;
    star.push_back(random_tensor(rng, {0, 1, 2, 3, 4}));
    for (int i = 0; i < 5; ++i) star.push_back(random_tensor(rng, {i, 10 + i}));
    const std::vector<int> open{10, 11, 12, 13, 14};
    const auto star_order = greedy_order(star, open);
    EXPECT_EQ(star_order.peak_elements, 32U);
    const Tensor s1 = contract(star, star_order.steps, open);
    const Tensor s2 = contract(star, naive_order(star.size()), open);
    for (std::size_t i = 0; i < s1.data.size(); ++i) EXPECT_LE(std::abs(s1.data[i] - s2.data[i]), 1e-12);
}

TEST(contraction_order, greedy_within_factor_four_of_optimal) {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> open;
        const auto nodes = random_network(rng, 8, 0.25, 3, open);
        const auto order = greedy_order(nodes, open);
        const auto replay = evaluate_order(nodes, order.steps);
        EXPECT_EQ(replay.peak_elements, order.peak_elements);
        const std::size_t best = optimal_peak(nodes);
        EXPECT_LE(order.peak_elements, 4 * best) << "trial " << trial;
    }
}

TEST(contraction_order, result_independent_of_order) {
    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> open;
        const auto nodes = random_network(rng, 10, 0.15, 4, open);
        const Tensor a = contract(nodes, greedy_order(nodes, open).steps, open);
        const Tensor b = contract(nodes, naive_order(nodes.size()), open);
        ASSERT_EQ(a.data.size(), b.data.size());
        double scale = 0.0;
        for (const auto& z : b.data) scale = std::max(scale, std::abs(z));
        for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_LE(std::abs(a.data[i] - b.data[i]), 1e-10 * (1 + scale));
    }
}

TEST(contraction_order, disconnected_components_use_outer_products) {
    Rng rng(15);
    std::vector<Tensor> nodes{random_tensor(rng, {0}), random_tensor(rng, {1}), random_tensor(rng, {2})};
    const auto order = greedy_order(nodes, {0, 1, 2});
    EXPECT_EQ(order.steps.size(), 2U);
    const Tensor t = contract(nodes, order.steps, {0, 1, 2});
    EXPECT_LE(std::abs(t.data[5] - nodes[0].data[1] * nodes[1].data[0] * nodes[2].data[1]), 1e-14);
}

TEST(matfree, identity_and_columns) {
    const QmlModel id(Circuit(3), Measurement::computational(3, {0, 1, 2}));
    std::vector<std::size_t> all(8);
    for (std::size_t i = 0; i < 8; ++i) all[i] = i;
    Rng rng(16);
    const auto v = oracle::random_vector(rng, 8);
    EXPECT_LE((matfree_apply(build_heisenberg_tn(id, all), v) - v).norm(), 1e-13);

    const auto model = oracle::random_model(rng, {3, 10, 2, true}, 2, 3, false);
    const auto tn = build_heisenberg_tn(model, {1});
    const ComplexMatrix dense = contract_dense(tn);
    const MatfreeOperator op(tn);
    for (Eigen::Index j = 0; j < 8; ++j) {
        ComplexVector e = ComplexVector::Zero(8);
        e(j) = 1.0;
        EXPECT_LE((op.apply(e) - dense.col(j)).norm(), 1e-12);
    }
    const auto x = oracle::random_vector(rng, 8);
    const auto y = oracle::random_vector(rng, 8);
    const Complex a(0.3, -1.2), b(-0.7, 0.4);
    EXPECT_LE((op.apply(a * x + b * y) - (a * op.apply(x) + b * op.apply(y))).norm(), 1e-12);
    EXPECT_THROW(op.apply(ComplexVector::Zero(4)), DimensionError);
}

TEST(lanczos, diagonal_operator) {
    const Eigen::Index dim = 200;
    Eigen::VectorXd diag(dim);
    for (Eigen::Index i = 0; i < dim; ++i) diag(i) = std::sin(0.37 * static_cast<double>(i)) + 0.001 * static_cast<double>(i);
    const auto r = lanczos_extremes([&](const ComplexVector& v) { return ComplexVector(diag.cast<Complex>().cwiseProduct(v)); },
                                    dim, {1e-10, 5000, 40, 1, true});
    EXPECT_NEAR(r.lambda_max, diag.maxCoeff(), 1e-8);
    EXPECT_NEAR(r.lambda_min, diag.minCoeff(), 1e-8);
}

TEST(lanczos, dense_hermitian_against_jacobi) {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix h = oracle::random_hermitian(rng, 64);
        const auto ref = oracle::jacobi_eigen(h);
        const auto r = lanczos_extremes([&](const ComplexVector& v) { return ComplexVector(h * v); }, 64,
                                        {1e-10, 5000, 40, static_cast<std::uint64_t>(trial), true});
        EXPECT_NEAR(r.lambda_min, ref.values.front(), 1e-8);
        EXPECT_NEAR(r.lambda_max, ref.values.back(), 1e-8);
        EXPECT_LE((h * r.v_max - r.lambda_max * r.v_max).norm(), 1e-6);
    }
}

TEST(lanczos, small_space_breakdown_is_exact) {
    ComplexMatrix h = ComplexMatrix::Zero(4, 4);
    h(0, 0) = 2.0;
    h(3, 3) = -1.0;
    const auto r = lanczos_extremes([&](const ComplexVector& v) { return ComplexVector(h * v); }, 4);
    EXPECT_NEAR(r.lambda_max, 2.0, 1e-12);
    EXPECT_NEAR(r.lambda_min, -1.0, 1e-12);
    EXPECT_LE(r.matvecs, 8);
}

TEST(lanczos, errors) {
    Rng rng(18);
    const ComplexMatrix nh = oracle::random_unitary(rng, 16);
    EXPECT_THROW(lanczos_extremes([&](const ComplexVector& v) { return ComplexVector(nh * v); }, 16), InputError);
    const ComplexMatrix h = oracle::random_hermitian(rng, 300);
    EXPECT_THROW(lanczos_extremes([&](const ComplexVector& v) { return ComplexVector(h * v); }, 300, {1e-14, 30, 20, 1, true}),
                 ConvergenceError);
}

TEST(lipschitz_tn, agrees_with_dense) {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = oracle::random_model(rng, {4, 12, 3, true}, 1 + trial % 3, 2 + trial % 3, trial % 2 == 1);
        const auto tn = lipschitz_tn(model);
        const auto dense = lipschitz_dense(model);
        EXPECT_NEAR(tn.k_star, dense.k_star, 1e-5) << "trial " << trial;
        EXPECT_EQ(tn.engine, "tn");
        ASSERT_TRUE(tn.stats.has_value());
        EXPECT_GT(tn.stats->matvecs, 0U);
    }
}

TEST(lipschitz_tn, eight_qubits_and_closed_form) {
    Rng rng(20);
    const auto model = oracle::random_model(rng, {8, 30, 4, true}, 2, 3, false);
    EXPECT_NEAR(lipschitz_tn(model).k_star, lipschitz_dense(model).k_star, 1e-5);

    Circuit c(1);
    c.append(Gate::make("h", {0}));
    c.append(Gate::make("h", {0}));
    const QmlModel bf(append_noise(c, standard_channel(NoiseKind::bit_flip, 1e-4), {0}), Measurement::computational(1, {0}));
    EXPECT_NEAR(lipschitz_tn(bf).k_star, 0.99980, 1e-6);
}
