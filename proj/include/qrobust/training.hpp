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
#include <string>
#include <vector>

#include "qrobust/circuit.hpp"
#include "qrobust/local.hpp"

namespace qrobust {

/// A trainable rotation: instruction `instruction` of the template is an
/// rx, ry or rz gate whose angle is parameter `name`.
struct ParamSite {
    std::size_t instruction;
    std::string name;
};

/// Circuit template with rotation angles exposed as parameters.
class ParameterizedModel {
public:
    /// Every rx/ry/rz gate of the circuit becomes a parameter "theta<k>"
    /// initialised to its current angle.
    static ParameterizedModel from_circuit(Circuit circuit, Measurement measurement);
    /// Explicit sites; throws InputError on a site that is not a
    /// single-qubit rotation.
    ParameterizedModel(Circuit circuit, Measurement measurement, std::vector<ParamSite> sites,
                       std::vector<double> theta);

    std::size_t size() const { return sites_.size(); }
    const std::vector<ParamSite>& sites() const { return sites_; }
    const std::vector<double>& theta() const { return theta_; }
    void set_theta(std::vector<double> theta);
    const Measurement& measurement() const { return measurement_; }
    const Circuit& circuit_template() const { return circuit_; }

    QmlModel bind() const;
    QmlModel bind(const std::vector<double>& theta) const;

private:
    Circuit circuit_;
    Measurement measurement_;
    std::vector<ParamSite> sites_;
    std::vector<double> theta_;
};

/// d p_c / d theta_j = (p_c(theta_j + pi/2) - p_c(theta_j - pi/2)) / 2.
std::vector<double> param_shift_grad(const ParameterizedModel& model, const DensityMatrix& rho, std::size_t label);

/// Mean cross-entropy -log p_label over the data and its gradient.
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};
double cross_entropy(const QmlModel& model, const std::vector<LabeledState>& data);
LossGrad cross_entropy_grad(const ParameterizedModel& model, const std::vector<LabeledState>& data);

struct TrainOptions {
    double eps = 0.001;
    int epochs = 10;
    double lr = 0.05;
    std::uint64_t seed = 0;
    /// 0 means full batch; otherwise minibatches in a seeded shuffled order.
    std::size_t batch_size = 0;
    int steps_per_epoch = 5;
    /// Line search halvings before a step is skipped.
    int max_backoff = 10;
};

struct EpochRecord {
    int epoch = 0;
    double loss_before = 0.0;  // training loss at the start of the update phase
    double loss = 0.0;         // training loss after the update phase
    double rough_ra = 0.0;
    double accurate_ra = 0.0;
    std::size_t counterexamples_added = 0;
};

struct TrainResult {
    ParameterizedModel model;
    std::vector<EpochRecord> history;
    /// Every state appended to the training set, with its true label.
    std::vector<LabeledState> added;
};

/// Per epoch: verify the original data in accurate mode, append each new
/// counterexample with its true label, then take gradient steps on the
/// cross-entropy of the augmented set with a halving line search. Training
/// stops after an epoch whose verification finds no counterexample at all
/// (misclassified inputs included), leaving the parameters unchanged.
TrainResult adversarial_train(const ParameterizedModel& model, const std::vector<LabeledState>& data,
                              const TrainOptions& opts);

/// epoch,loss,rough_ra,accurate_ra,counterexamples_added
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace qrobust
