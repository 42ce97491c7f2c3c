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

#include "qrobust/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "qrobust/errors.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/noise.hpp"

namespace qrobust {

namespace {

bool is_param_rotation(const std::string& name) { return name == "rx" || name == "ry" || name == "rz"; }

constexpr double kMinProbability = 1e-12;

}  // namespace

ParameterizedModel ParameterizedModel::from_circuit(Circuit circuit, Measurement measurement) {
    std::vector<ParamSite> sites;
    std::vector<double> theta;
    const auto& insts = circuit.instructions();
    for (std::size_t i = 0; i < insts.size(); ++i) {
        const auto* g = std::get_if<Gate>(&insts[i]);
        if (g == nullptr || !is_param_rotation(g->name)) continue;
        sites.push_back({i, "theta" + std::to_string(sites.size())});
        theta.push_back(g->params.at(0));
    }
    return ParameterizedModel(std::move(circuit), std::move(measurement), std::move(sites), std::move(theta));
}

ParameterizedModel::ParameterizedModel(Circuit circuit, Measurement measurement, std::vector<ParamSite> sites,
                                       std::vector<double> theta)
    : circuit_(std::move(circuit)), measurement_(std::move(measurement)), sites_(std::move(sites)) {
    if (measurement_.n_qubits() != circuit_.n_qubits())
        throw DimensionError("parameterized model: measurement and circuit disagree on qubit count");
    const auto& insts = circuit_.instructions();
    std::vector<bool> taken(insts.size(), false);
    for (const auto& s : sites_) {
        if (s.instruction >= insts.size()) throw InputError("parameter '" + s.name + "' points past the circuit");
        const auto* g = std::get_if<Gate>(&insts[s.instruction]);
        if (g == nullptr || !is_param_rotation(g->name))
            throw InputError("parameter '" + s.name + "' is not on an rx, ry or rz gate");
        if (taken[s.instruction]) throw InputError("instruction " + std::to_string(s.instruction) + " has two parameters");
        taken[s.instruction] = true;
    }
    set_theta(std::move(theta));
}

void ParameterizedModel::set_theta(std::vector<double> theta) {
    if (theta.size() != sites_.size())
        throw DimensionError("expected " + std::to_string(sites_.size()) + " parameters, got " +
                             std::to_string(theta.size()));
    for (double t : theta)
        if (!std::isfinite(t)) throw InputError("parameter value is not finite");
    theta_ = std::move(theta);
}

QmlModel ParameterizedModel::bind() const { return bind(theta_); }

QmlModel ParameterizedModel::bind(const std::vector<double>& theta) const {
    if (theta.size() != sites_.size()) throw DimensionError("parameter vector has the wrong length");
    std::vector<std::ptrdiff_t> slot(circuit_.size(), -1);
    for (std::size_t k = 0; k < sites_.size(); ++k) slot[sites_[k].instruction] = static_cast<std::ptrdiff_t>(k);
    Circuit c(circuit_.n_qubits());
    const auto& insts = circuit_.instructions();
    for (std::size_t i = 0; i < insts.size(); ++i) {
        if (slot[i] < 0) {
            c.append(insts[i]);
            continue;
        }
        const Gate& g = std::get<Gate>(insts[i]);
        c.append(Gate::make(g.name, g.qubits, {theta[static_cast<std::size_t>(slot[i])]}));
    }
    return QmlModel(std::move(c), measurement_);
}

std::vector<double> param_shift_grad(const ParameterizedModel& model, const DensityMatrix& rho, std::size_t label) {
    if (label >= model.measurement().size()) throw InputError("label index outside the measurement label set");
    std::vector<double> grad(model.size());
    std::vector<double> theta = model.theta();
    const double shift = 0.5 * std::numbers::pi;
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double t = theta[j];
        theta[j] = t + shift;
        const double plus = predict_distribution(model.bind(theta), rho)[label];
        theta[j] = t - shift;
        const double minus = predict_distribution(model.bind(theta), rho)[label];
        theta[j] = t;
        grad[j] = 0.5 * (plus - minus);
    }
    return grad;
}

double cross_entropy(const QmlModel& model, const std::vector<LabeledState>& data) {
    if (data.empty()) throw InputError("cross entropy of an empty dataset");
    std::vector<double> terms(data.size());
    const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& x = data[static_cast<std::size_t>(i)];
        const double p = predict_distribution(model, density_of(x.state))[x.label];
        terms[static_cast<std::size_t>(i)] = -std::log(std::max(p, kMinProbability));
    }
    // Summed in index order so the result does not depend on thread count.
    return std::accumulate(terms.begin(), terms.end(), 0.0) / static_cast<double>(data.size());
}

LossGrad cross_entropy_grad(const ParameterizedModel& model, const std::vector<LabeledState>& data) {
    if (data.empty()) throw InputError("cross entropy of an empty dataset");
    const QmlModel bound = model.bind();
    std::vector<double> terms(data.size());
    std::vector<std::vector<double>> grads(data.size());
    const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& x = data[static_cast<std::size_t>(i)];
        const DensityMatrix rho = density_of(x.state);
        const double p = std::max(predict_distribution(bound, rho)[x.label], kMinProbability);
        terms[static_cast<std::size_t>(i)] = -std::log(p);
        auto g = param_shift_grad(model, rho, x.label);
        for (double& v : g) v *= -1.0 / p;
        grads[static_cast<std::size_t>(i)] = std::move(g);
    }
    LossGrad out;
    out.grad.assign(model.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.loss += terms[i];
        for (std::size_t j = 0; j < model.size(); ++j) out.grad[j] += grads[i][j];
    }
    out.loss *= inv;
    for (double& v : out.grad) v *= inv;
    return out;
}

TrainResult adversarial_train(const ParameterizedModel& model, const std::vector<LabeledState>& data,
                              const TrainOptions& opts) {
    if (data.empty()) throw InputError("training data is empty");
    if (!(opts.lr > 0.0)) throw InputError("learning rate must be positive");
    if (opts.epochs < 1) throw InputError("epochs must be at least 1");
    if (opts.steps_per_epoch < 1) throw InputError("steps per epoch must be at least 1");

    TrainResult result{model, {}, {}};
    ParameterizedModel& pm = result.model;
    std::vector<LabeledState> train = data;

    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        const DatasetReport report = verify_dataset(pm.bind(), data, opts.eps, VerifyMode::accurate);
        rec.rough_ra = report.rough_ra;
        rec.accurate_ra = report.accurate_ra;
        bool any_counterexample = false;
        for (const auto& st : report.states) {
            any_counterexample = any_counterexample || st.verdict.counterexample.has_value();
            // Misclassified inputs are their own counterexample and already
            // sit in the training set.
            if (!st.verdict.counterexample || st.misclassified) continue;
            LabeledState adv{st.verdict.counterexample->state, st.label};
            train.push_back(adv);
            result.added.push_back(std::move(adv));
            ++rec.counterexamples_added;
        }
        rec.loss_before = cross_entropy(pm.bind(), train);
        if (!any_counterexample) {
            rec.loss = rec.loss_before;
            result.history.push_back(rec);
            break;
        }

        std::vector<std::size_t> order(train.size());
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(epoch)));
        std::size_t cursor = train.size();
        for (int step = 0; step < opts.steps_per_epoch; ++step) {
            std::vector<LabeledState> batch;
            if (opts.batch_size == 0 || opts.batch_size >= train.size()) {
                batch = train;
            } else {
                for (std::size_t k = 0; k < opts.batch_size; ++k) {
                    if (cursor >= order.size()) {
                        std::shuffle(order.begin(), order.end(), rng);
                        cursor = 0;
                    }
                    batch.push_back(train[order[cursor++]]);
                }
            }
            const LossGrad lg = cross_entropy_grad(pm, batch);
            double lr = opts.lr;
            for (int b = 0; b <= opts.max_backoff; ++b, lr *= 0.5) {
                std::vector<double> trial = pm.theta();
                for (std::size_t j = 0; j < trial.size(); ++j) trial[j] -= lr * lg.grad[j];
                if (cross_entropy(pm.bind(trial), batch) <= lg.loss) {
                    pm.set_theta(std::move(trial));
                    break;
                }
            }
        }
        rec.loss = cross_entropy(pm.bind(), train);
        result.history.push_back(rec);
    }
    return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::string out = "epoch,loss,rough_ra,accurate_ra,counterexamples_added\n";
    char buf[160];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%zu\n", r.epoch, r.loss, r.rough_ra, r.accurate_ra,
                      r.counterexamples_added);
        out += buf;
    }
    return out;
}

}  // namespace qrobust
