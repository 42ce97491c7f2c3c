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
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "qrobust/circuit.hpp"
#include "qrobust/linalg.hpp"

namespace qrobust {

using StateValue = std::variant<PureState, DensityMatrix>;

DensityMatrix density_of(const StateValue& s);
int n_qubits_of(const StateValue& s);

/// A dataset entry; `label` indexes the model's measurement labels.
struct LabeledState {
    StateValue state;
    std::size_t label = 0;
};

enum class LocalStatus { robust, non_robust, undecided_by_rough, undecided };
std::string_view to_string(LocalStatus s);

struct Counterexample {
    StateValue state;
    std::size_t original_label = 0;
    std::size_t adversarial_label = 0;
    double f_bar = 0.0;  // 1 - F(rho, sigma)
};

/// `margin` is the probability gap for the rough check and the optimal
/// dissimilarity 1 - F* for the exact checks. For exact checks
/// `f_bar_lower` is a certified lower bound on 1 - F* from the dual.
struct LocalVerdict {
    LocalStatus status = LocalStatus::undecided;
    std::optional<Counterexample> counterexample;
    double margin = 0.0;
    double f_bar_lower = 0.0;
};

/// Sound fast check: robust iff p_c - max_{l != c} p_l > 2 sqrt(eps), which
/// follows from F >= 1 - eps => D <= sqrt(eps) => tv <= sqrt(eps).
/// Anything else is undecided_by_rough.
LocalVerdict rough_check(const QmlModel& model, const LabeledState& x, double eps);

struct ExactOptions {
    /// Counterexamples satisfy p_l - p_c >= margin so they are strictly
    /// misclassified after rounding.
    double margin = 1e-10;
    /// Stop bisecting once the constraint is within this of the margin.
    double constraint_tol = 1e-8;
    int max_bisections = 200;
    double mu_cap = 1e12;
    /// Points of the coarse multiplier grid used as a cross-check.
    int grid_points = 48;
};

/// Precomputes E^dagger(M_c) for every label so that per-state checks only
/// solve eigenproblems.
class LocalVerifier {
public:
    explicit LocalVerifier(const QmlModel& model, ExactOptions opts = {});

    const QmlModel& model() const { return *model_; }
    const std::vector<ComplexMatrix>& observables() const { return observables_; }

    LocalVerdict rough(const LabeledState& x, double eps) const;
    /// max |<psi|phi>|^2 subject to <phi|A_l|phi> >= 0 for some l != c with
    /// A_l = E^dagger(M_l - M_c), solved by a Lagrangian eigen-iteration.
    /// Returns non_robust iff 1 - F* <= eps, with a re-checked counterexample.
    LocalVerdict exact_pure(const PureState& psi, std::size_t label, double eps) const;
    /// Mixed input: the fidelity problem over sigma is lifted to a pure
    /// problem on a purification of rho (Uhlmann), solved as above, and the
    /// counterexample is the partial trace over the ancilla.
    LocalVerdict exact_mixed(const DensityMatrix& rho, std::size_t label, double eps) const;
    LocalVerdict exact(const LabeledState& x, double eps) const;

private:
    const QmlModel* model_;
    ExactOptions opts_;
    std::vector<ComplexMatrix> observables_;
};

LocalVerdict exact_check_pure(const QmlModel& model, const PureState& psi, std::size_t label, double eps);
LocalVerdict exact_check_mixed(const QmlModel& model, const DensityMatrix& rho, std::size_t label, double eps);

/// Result of the single-constraint problem max |<x|v>|^2 s.t. v^dagger A v >=
/// margin, |v| = 1. `best` is feasible (when `feasible`), `value` its
/// objective and `upper` a dual upper bound on the optimum.
struct QcqpResult {
    bool feasible = false;
    ComplexVector best;
    double value = 0.0;
    double upper = 0.0;
    double multiplier = 0.0;
};
QcqpResult max_overlap_with_constraint(const ComplexVector& x, const ComplexMatrix& a, const ExactOptions& opts = {});

enum class VerifyMode { rough, accurate };
std::string_view to_string(VerifyMode m);
VerifyMode parse_verify_mode(std::string_view text);

struct StateResult {
    std::size_t index = 0;
    std::size_t label = 0;
    std::size_t predicted = 0;
    bool misclassified = false;
    LocalStatus rough_status = LocalStatus::undecided_by_rough;
    LocalVerdict verdict;  // final verdict for the chosen mode
    double seconds = 0.0;
};

struct DatasetReport {
    VerifyMode mode = VerifyMode::accurate;
    double eps = 0.0;
    std::vector<StateResult> states;
    double rough_ra = 0.0;     // percent
    double accurate_ra = 0.0;  // percent; equals rough_ra in rough mode
    std::size_t robust_count() const;
    std::vector<Counterexample> counterexamples() const;
    std::vector<std::size_t> counterexample_indices() const;
};

/// Robust accuracy over a dataset. Misclassified inputs count as
/// non-robust with themselves as counterexample. Accurate mode escalates
/// only the states the rough check leaves undecided.
DatasetReport verify_dataset(const QmlModel& model, const std::vector<LabeledState>& data, double eps,
                             VerifyMode mode);

}  // namespace qrobust
