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

#include "qrobust/local.hpp"

#include <cmath>

#include "gtest/gtest.h"

#include "qrobust/errors.hpp"
#include "qrobust/noise.hpp"
#include "test_support.hpp"

using namespace qrobust;
using qrobust::oracle::Rng;

namespace {

QmlModel identity_model() { return QmlModel(Circuit(1), Measurement::computational(1, {0})); }

PureState amplitudes(double a, double b) {
    ComplexVector v(2);
    v << a, b;
    return PureState::from_amplitudes(v);
}

void expect_feasible(const QmlModel& model, const LabeledState& x, const LocalVerdict& v, double eps) {
    ASSERT_EQ(v.status, LocalStatus::non_robust);
    ASSERT_TRUE(v.counterexample.has_value());
    const auto& ce = *v.counterexample;
    const DensityMatrix sigma = density_of(ce.state);
    const double fbar = 1.0 - oracle::jacobi_fidelity(density_of(x.state).matrix(), sigma.matrix());
    EXPECT_LE(fbar, eps + 1e-6);
    EXPECT_NE(classify(model, sigma), x.label);
    EXPECT_EQ(classify(model, sigma), ce.adversarial_label);
}

}  // namespace

TEST(rough_check, maximal_gap_is_robust) {
    const auto v = rough_check(identity_model(), {PureState::basis(1, 0), 0}, 0.001);
    EXPECT_EQ(v.status, LocalStatus::robust);
    EXPECT_NEAR(v.margin, 1.0, 1e-15);
}

TEST(rough_check, small_gap_is_undecided) {
    const auto v = rough_check(identity_model(), {amplitudes(std::sqrt(0.51), std::sqrt(0.49)), 0}, 0.001);
    EXPECT_EQ(v.status, LocalStatus::undecided_by_rough);
    EXPECT_NEAR(v.margin, 0.02, 1e-12);
}

TEST(rough_check, misclassified_input_is_its_own_counterexample) {
    const auto v = rough_check(identity_model(), {PureState::basis(1, 1), 0}, 0.001);
    EXPECT_EQ(v.status, LocalStatus::non_robust);
    ASSERT_TRUE(v.counterexample);
    EXPECT_EQ(v.counterexample->adversarial_label, 1U);
    EXPECT_EQ(v.counterexample->f_bar, 0.0);
}

TEST(exact_check_pure, worked_example) {
    const auto psi = amplitudes(std::sqrt(0.51), std::sqrt(0.49));
    const auto v = exact_check_pure(identity_model(), psi, 0, 0.001);
    const double f_star = 0.5 * std::pow(std::sqrt(0.51) + std::sqrt(0.49), 2);
    EXPECT_NEAR(f_star, 0.99990, 1e-6);
    EXPECT_NEAR(v.margin, 1.0 - f_star, 1e-8);
    expect_feasible(identity_model(), {psi, 0}, v, 0.001);
}

TEST(exact_check_pure, basis_state_is_robust) {
    const auto v = exact_check_pure(identity_model(), PureState::basis(1, 0), 0, 0.001);
    EXPECT_EQ(v.status, LocalStatus::robust);
    EXPECT_NEAR(v.margin, 0.5, 1e-8);
    EXPECT_NEAR(v.f_bar_lower, 0.5, 1e-8);
}

TEST(exact_check_pure, misclassified_returns_input) {
    const auto v = exact_check_pure(identity_model(), amplitudes(std::sqrt(0.4), std::sqrt(0.6)), 0, 0.001);
    EXPECT_EQ(v.status, LocalStatus::non_robust);
    EXPECT_EQ(v.counterexample->f_bar, 0.0);
}

TEST(exact_check_pure, matches_grid_oracle_on_one_qubit_models) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = oracle::random_model(rng, {1, 4, 1, false}, 1, 2 + trial % 2, trial % 3 == 0);
        const auto psi = oracle::random_pure(rng, 1);
        const std::size_t c = classify(model, psi);
        const double eps = 0.05;
        const auto v = exact_check_pure(model, psi, c, eps);
        ASSERT_NE(v.status, LocalStatus::undecided);
        const double grid = oracle::grid_fbar_1q(model, psi, c);
        EXPECT_NEAR(v.margin, grid, 1e-3) << "trial " << trial;
        EXPECT_LE(v.margin, grid + 1e-9);
        EXPECT_EQ(v.status == LocalStatus::non_robust, v.margin <= eps);
        if (v.status == LocalStatus::non_robust) expect_feasible(model, {psi, c}, v, eps);
    }
}

TEST(exact_check_pure, dual_bound_brackets_optimum) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 2, true}, 1 + trial % 2, 3, false);
        const auto psi = oracle::random_pure(rng, 2);
        const auto v = exact_check_pure(model, psi, classify(model, psi), 0.01);
        EXPECT_LE(v.f_bar_lower, v.margin + 1e-12);
        EXPECT_LE(v.margin - v.f_bar_lower, 1e-6) << "trial " << trial;
    }
}

TEST(exact_check_pure, monotone_in_eps) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 1, true}, 1, 2, false);
        const auto psi = oracle::random_pure(rng, 2);
        const std::size_t c = classify(model, psi);
        // Robust at some eps implies robust at every smaller eps.
        bool seen_robust = false;
        for (double eps : {0.2, 0.05, 0.01, 0.001}) {
            const bool robust = exact_check_pure(model, psi, c, eps).status == LocalStatus::robust;
            if (seen_robust) EXPECT_TRUE(robust);
            seen_robust = seen_robust || robust;
        }
    }
}

TEST(exact_check_mixed, pure_input_agrees_with_pure_solver) {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 1, true}, 1, 2, false);
        const auto psi = oracle::random_pure(rng, 2);
        const std::size_t c = classify(model, psi);
        const auto vp = exact_check_pure(model, psi, c, 0.01);
        const auto vm = exact_check_mixed(model, psi.density(), c, 0.01);
        EXPECT_NEAR(vp.margin, vm.margin, 1e-3);
        EXPECT_EQ(vp.status, vm.status);
    }
}

TEST(exact_check_mixed, maximally_mixed_tie) {
    const auto model = identity_model();
    const auto rho = DensityMatrix::maximally_mixed(1);
    const auto v1 = exact_check_mixed(model, rho, 1, 0.001);
    EXPECT_EQ(v1.status, LocalStatus::non_robust);
    EXPECT_EQ(v1.counterexample->f_bar, 0.0);
    const auto v0 = exact_check_mixed(model, rho, 0, 0.001);
    expect_feasible(model, {rho, 0}, v0, 0.001);
}

TEST(exact_check_mixed, beats_sampled_feasible_points) {
    Rng rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 1, true}, 1, 2, false);
        const auto rho = oracle::random_density(rng, 2, trial % 2 == 0 ? 0 : 2);
        const std::size_t c = classify(model, rho);
        const double eps = 0.02;
        const auto v = exact_check_mixed(model, rho, c, eps);
        ASSERT_NE(v.status, LocalStatus::undecided);
        const double sampled = oracle::sampled_fbar_mixed(rng, model, rho, c, 2000);
        // Slack equals the solver's constraint tolerance.
        EXPECT_LE(v.margin, sampled + 1e-8) << "trial " << trial << " diff " << v.margin - sampled;
        EXPECT_LE(sampled - v.margin, 1e-2) << "trial " << trial;
        if (v.status == LocalStatus::non_robust) expect_feasible(model, {rho, c}, v, eps);
    }
}

TEST(max_overlap_with_constraint, infeasible_and_trivial_cases) {
    ComplexVector x(2);
    x << 1.0, 0.0;
    ComplexMatrix neg = -ComplexMatrix::Identity(2, 2);
    EXPECT_FALSE(max_overlap_with_constraint(x, neg).feasible);
    const auto r = max_overlap_with_constraint(x, ComplexMatrix::Identity(2, 2));
    EXPECT_TRUE(r.feasible);
    EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(max_overlap_with_constraint, degenerate_top_eigenvalue) {
    // A = diag(-1, 1, 1): the optimum mixes the degenerate directions.
    ComplexVector x(3);
    x << std::sqrt(0.9), std::sqrt(0.05), std::sqrt(0.05);
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a(0, 0) = -1;
    a(1, 1) = 1;
    a(2, 2) = 1;
    ExactOptions opts;
    opts.margin = 0.0;
    const auto r = max_overlap_with_constraint(x, a, opts);
    ASSERT_TRUE(r.feasible);
    // Closest point of the cone |v0|^2 <= |v1|^2 + |v2|^2: 0.5 (sqrt 0.9 + sqrt 0.1)^2.
    EXPECT_NEAR(r.value, 0.5 * std::pow(std::sqrt(0.9) + std::sqrt(0.1), 2), 1e-8);
    EXPECT_LE(r.upper - r.value, 1e-7);
}

TEST(rough_check, sound_against_random_search) {
    Rng rng(8);
    const double eps = 0.005;
    for (int trial = 0; trial < 5; ++trial) {
        const auto model = oracle::random_model(rng, {2, 5, 1, true}, 1, 2, false);
        for (int s = 0; s < 5; ++s) {
            const auto psi = oracle::random_pure(rng, 2);
            const std::size_t c = classify(model, psi);
            if (rough_check(model, {psi, c}, eps).status != LocalStatus::robust) continue;
            for (int k = 0; k < 500; ++k) ASSERT_EQ(classify(model, oracle::random_nearby_pure(rng, psi, eps)), c);
        }
    }
}

TEST(verify_dataset, all_robust_dataset) {
    std::vector<LabeledState> data;
    for (int i = 0; i < 4; ++i) data.push_back({PureState::basis(1, static_cast<std::size_t>(i % 2)), static_cast<std::size_t>(i % 2)});
    for (auto mode : {VerifyMode::rough, VerifyMode::accurate}) {
        const auto r = verify_dataset(identity_model(), data, 0.001, mode);
        EXPECT_DOUBLE_EQ(r.rough_ra, 100.0);
        EXPECT_DOUBLE_EQ(r.accurate_ra, 100.0);
        EXPECT_TRUE(r.counterexamples().empty());
    }
}

TEST(verify_dataset, rough_never_exceeds_accurate_and_escalation_is_consistent) {
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const auto model = oracle::random_model(rng, {2, 6, 2, true}, 1, 2, false);
        std::vector<LabeledState> data;
        for (int i = 0; i < 12; ++i) {
            auto psi = oracle::random_pure(rng, 2);
            const std::size_t c = i % 5 == 0 ? 1 - classify(model, psi) : classify(model, psi);
            data.push_back({psi, c});
        }
        const auto rough = verify_dataset(model, data, 0.01, VerifyMode::rough);
        const auto acc = verify_dataset(model, data, 0.01, VerifyMode::accurate);
        EXPECT_LE(rough.accurate_ra, acc.accurate_ra);
        EXPECT_DOUBLE_EQ(rough.rough_ra, acc.rough_ra);
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (rough.states[i].verdict.status == LocalStatus::robust)
                EXPECT_EQ(acc.states[i].verdict.status, LocalStatus::robust);
            if (acc.states[i].verdict.status == LocalStatus::non_robust)
                expect_feasible(model, data[i], acc.states[i].verdict, 0.01);
            if (data[i].label != classify(model, std::get<PureState>(data[i].state)))
                EXPECT_TRUE(acc.states[i].misclassified);
        }
    }
}

TEST(verify_dataset, input_errors) {
    EXPECT_THROW(verify_dataset(identity_model(), {}, 0.01, VerifyMode::rough), InputError);
    std::vector<LabeledState> wrong = {{PureState::basis(2, 0), 0}};
    EXPECT_THROW(verify_dataset(identity_model(), wrong, 0.01, VerifyMode::rough), DimensionError);
    std::vector<LabeledState> bad_label = {{PureState::basis(1, 0), 5}};
    EXPECT_THROW(verify_dataset(identity_model(), bad_label, 0.01, VerifyMode::rough), InputError);
    std::vector<LabeledState> ok = {{PureState::basis(1, 0), 0}};
    EXPECT_THROW(verify_dataset(identity_model(), ok, 0.0, VerifyMode::rough), InputError);
}
