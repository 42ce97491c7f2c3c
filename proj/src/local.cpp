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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>

#include "qrobust/errors.hpp"

namespace qrobust {

DensityMatrix density_of(const StateValue& s) {
    if (const auto* p = std::get_if<PureState>(&s)) return p->density();
    return std::get<DensityMatrix>(s);
}

int n_qubits_of(const StateValue& s) {
    return std::visit([](const auto& v) { return v.n_qubits(); }, s);
}

std::string_view to_string(LocalStatus s) {
    switch (s) {
        case LocalStatus::robust: return "robust";
        case LocalStatus::non_robust: return "non_robust";
        case LocalStatus::undecided_by_rough: return "undecided_by_rough";
        case LocalStatus::undecided: return "undecided";
    }
    return "undecided";
}

std::string_view to_string(VerifyMode m) { return m == VerifyMode::rough ? "rough" : "accurate"; }

VerifyMode parse_verify_mode(std::string_view text) {
    if (text == "rough") return VerifyMode::rough;
    if (text == "accurate") return VerifyMode::accurate;
    throw InputError("unknown verification mode '" + std::string(text) + "' (expected rough or accurate)");
}

namespace {

ProbabilityVector distribution(const QmlModel& model, const StateValue& s) {
    if (const auto* p = std::get_if<PureState>(&s)) return predict_distribution(model, *p);
    return predict_distribution(model, std::get<DensityMatrix>(s));
}

void check_inputs(const QmlModel& model, int n_qubits, std::size_t label, double eps) {
    if (n_qubits != model.n_qubits())
        throw DimensionError("state has " + std::to_string(n_qubits) + " qubits, model has " +
                             std::to_string(model.n_qubits()));
    if (label >= model.measurement().size())
        throw InputError("label index " + std::to_string(label) + " outside the measurement label set");
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
}

LocalVerdict zero_perturbation(const StateValue& s, std::size_t label, std::size_t predicted) {
    LocalVerdict v;
    v.status = LocalStatus::non_robust;
    v.counterexample = Counterexample{s, label, predicted, 0.0};
    v.margin = 0.0;
    v.f_bar_lower = 0.0;
    return v;
}

struct TopPair {
    double lambda;
    ComplexVector v;
};

TopPair top_eigen(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed in exact local check");
    const auto last = h.rows() - 1;
    return {es.eigenvalues()[last], es.eigenvectors().col(last)};
}

struct Probe {
    double mu;
    double lambda;
    ComplexVector v;
    double f;
    double g;
};

// Two-dimensional case in closed form. On the Bloch sphere both forms are
// affine, v^dagger M v = m0 + m . n, so the problem is a linear objective
// over a spherical cap {b . n >= c}.
struct Bloch {
    double m0;
    Eigen::Vector3d m;
};

Bloch bloch_of(const ComplexMatrix& h) {
    return {0.5 * (h(0, 0).real() + h(1, 1).real()),
            Eigen::Vector3d(h(1, 0).real(), h(1, 0).imag(), 0.5 * (h(0, 0).real() - h(1, 1).real()))};
}

ComplexVector from_bloch(const Eigen::Vector3d& n) {
    const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    const double phi = std::atan2(n.y(), n.x());
    ComplexVector v(2);
    v << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi);
    return v;
}

// max |<x|v>|^2 over unit v in C^2 with v^dagger A v >= margin; A Hermitian.
// Returns nothing when the cap is empty.
std::optional<ComplexVector> solve_2d(const ComplexVector& x, const ComplexMatrix& ah, double margin) {
    const Bloch a = bloch_of(x * x.adjoint());
    const Bloch b = bloch_of(ah);
    const double bn = b.m.norm();
    const double c = margin - b.m0;
    if (bn == 0.0) return c <= 0.0 ? std::optional<ComplexVector>(x) : std::nullopt;
    // A little inside the boundary so the returned point passes the check.
    const double t = (c + 1e-12 * std::max(1.0, bn)) / bn;
    if (t > 1.0) return std::nullopt;
    const Eigen::Vector3d ahat = a.m.normalized();
    if (b.m.dot(ahat) >= c + 1e-12 * bn) return from_bloch(ahat);
    const Eigen::Vector3d bhat = b.m / bn;
    Eigen::Vector3d perp = ahat - ahat.dot(bhat) * bhat;
    if (perp.norm() < 1e-14) perp = bhat.unitOrthogonal();
    perp.normalize();
    const Eigen::Vector3d n = t * bhat + std::sqrt(std::max(0.0, 1.0 - t * t)) * perp;
    return from_bloch(n);
}

QcqpResult solve(const ComplexVector& x_in, const ComplexMatrix& a, const ExactOptions& opts) {
    QcqpResult r;
    const double scale = x_in.squaredNorm();
    if (scale == 0.0) throw InputError("zero vector in constrained overlap problem");
    const ComplexVector x = x_in / std::sqrt(scale);
    const ComplexMatrix xx = x * x.adjoint();
    const ComplexMatrix ah = 0.5 * (a + a.adjoint());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(ah, Eigen::EigenvaluesOnly);
    const double amax = ea.eigenvalues()[ah.rows() - 1];
    if (amax < opts.margin) {
        // Empty feasible set.
        r.feasible = false;
        r.upper = 0.0;
        return r;
    }
    const double g0 = (x.adjoint() * ah * x)(0).real();
    if (g0 >= opts.margin) {
        r.feasible = true;
        r.best = x;
        r.value = scale;
        r.upper = scale;
        return r;
    }
    if (x.size() == 2) {
        if (auto v = solve_2d(x, ah, opts.margin)) {
            r.feasible = true;
            r.best = *v;
            r.value = std::norm(x.dot(*v)) * scale;
            r.upper = r.value;
            return r;
        }
    }

    double upper = 1.0;
    auto probe = [&](double mu) {
        ComplexMatrix h = xx + mu * ah;
        TopPair t = top_eigen(0.5 * (h + h.adjoint()));
        Probe p{mu, t.lambda, t.v, std::norm(x.dot(t.v)), (t.v.adjoint() * ah * t.v)(0).real()};
        // Weak duality: any feasible v has f <= lambda_top(mu) - mu * margin.
        upper = std::min(upper, p.lambda - mu * opts.margin);
        return p;
    };

    Probe lo{0.0, 1.0, x, 1.0, g0};
    Probe hi = probe(1.0);
    while (hi.g < opts.margin) {
        lo = hi;
        if (hi.mu * 2.0 > opts.mu_cap) {
            r.feasible = false;
            r.upper = std::max(0.0, upper) * scale;
            return r;
        }
        hi = probe(hi.mu * 2.0);
    }
    for (int it = 0; it < opts.max_bisections; ++it) {
        if (hi.g - opts.margin <= opts.constraint_tol) break;
        if (hi.mu - lo.mu <= 1e-15 * hi.mu) break;
        Probe mid = probe(0.5 * (lo.mu + hi.mu));
        if (mid.g >= opts.margin) {
            hi = std::move(mid);
        } else {
            lo = std::move(mid);
        }
    }

    ComplexVector best = hi.v;
    double best_f = hi.f;

    // A jump in the constraint value means the top eigenvalue is degenerate
    // at the optimal multiplier; the optimum then mixes both eigenvectors.
    if (hi.g - opts.margin > opts.constraint_tol) {
        ComplexVector q2 = hi.v - lo.v.dot(hi.v) * lo.v;
        const double n2 = q2.norm();
        if (n2 > 1e-12) {
            q2 /= n2;
            ComplexMatrix q(x.size(), 2);
            q.col(0) = lo.v;
            q.col(1) = q2;
            const ComplexVector xs = q.adjoint() * x;
            if (xs.norm() > 0.0) {
                const ComplexMatrix as = q.adjoint() * ah * q;
                if (auto sub = solve_2d(xs.normalized(), 0.5 * (as + as.adjoint()), opts.margin)) {
                    const ComplexVector cand = (q * *sub).normalized();
                    const double gc = (cand.adjoint() * ah * cand)(0).real();
                    const double fc = std::norm(x.dot(cand));
                    if (gc >= opts.margin && fc > best_f) {
                        best = cand;
                        best_f = fc;
                    }
                }
            }
        }
    }

    if (opts.grid_points > 1) {
        const double top = hi.mu;
        for (int k = 0; k < opts.grid_points; ++k) {
            const double mu = top * std::pow(10.0, -8.0 + 9.0 * k / (opts.grid_points - 1));
            Probe p = probe(mu);
            if (p.g >= opts.margin && p.f > best_f) {
                best = p.v;
                best_f = p.f;
            }
        }
    }

    r.feasible = true;
    r.best = best;
    r.value = best_f * scale;
    r.upper = std::max(best_f, std::min(1.0, upper)) * scale;
    r.multiplier = hi.mu;
    return r;
}

}  // namespace

QcqpResult max_overlap_with_constraint(const ComplexVector& x, const ComplexMatrix& a, const ExactOptions& opts) {
    if (a.rows() != a.cols() || a.rows() != x.size()) throw DimensionError("constrained overlap: size mismatch");
    return solve(x, a, opts);
}

LocalVerifier::LocalVerifier(const QmlModel& model, ExactOptions opts)
    : model_(&model), opts_(opts), observables_(heisenberg_observables(model)) {}

LocalVerdict LocalVerifier::rough(const LabeledState& x, double eps) const {
    check_inputs(*model_, n_qubits_of(x.state), x.label, eps);
    const ProbabilityVector p = distribution(*model_, x.state);
    const std::size_t pred = argmax_label(p);
    if (pred != x.label) return zero_perturbation(x.state, x.label, pred);
    double runner_up = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l)
        if (l != x.label) runner_up = std::max(runner_up, p[l]);
    LocalVerdict v;
    v.margin = p[x.label] - runner_up;
    v.status = v.margin > 2.0 * std::sqrt(eps) ? LocalStatus::robust : LocalStatus::undecided_by_rough;
    return v;
}

namespace {

struct LabelSearch {
    bool found = false;
    std::size_t label = 0;
    ComplexVector best;
    double f_lower = -1.0;
    double f_upper = 0.0;
};

}  // namespace

LocalVerdict LocalVerifier::exact_pure(const PureState& psi, std::size_t label, double eps) const {
    check_inputs(*model_, psi.n_qubits(), label, eps);
    const std::size_t pred = classify(*model_, psi);
    if (pred != label) return zero_perturbation(StateValue{psi}, label, pred);

    LabelSearch s;
    for (std::size_t l = 0; l < observables_.size(); ++l) {
        if (l == label) continue;
        const ComplexMatrix a = observables_[l] - observables_[label];
        const QcqpResult r = max_overlap_with_constraint(psi.amplitudes(), a, opts_);
        s.f_upper = std::max(s.f_upper, r.upper);
        if (r.feasible && r.value > s.f_lower) {
            s.found = true;
            s.label = l;
            s.best = r.best;
            s.f_lower = r.value;
        }
    }

    LocalVerdict v;
    v.margin = s.found ? 1.0 - s.f_lower : 1.0;
    v.f_bar_lower = std::max(0.0, 1.0 - s.f_upper);
    if (s.found && 1.0 - s.f_lower <= eps) {
        const PureState sigma = PureState::normalized(s.best);
        const double fbar = 1.0 - fidelity(psi, sigma);
        const std::size_t adv = classify(*model_, sigma);
        if (fbar <= eps + 1e-6 && adv != label) {
            v.status = LocalStatus::non_robust;
            v.counterexample = Counterexample{StateValue{sigma}, label, adv, fbar};
            v.margin = fbar;
        } else {
            v.status = LocalStatus::undecided;
        }
    } else if (1.0 - s.f_upper > eps) {
        v.status = LocalStatus::robust;
    } else {
        v.status = LocalStatus::undecided;
    }
    return v;
}

LocalVerdict LocalVerifier::exact_mixed(const DensityMatrix& rho, std::size_t label, double eps) const {
    check_inputs(*model_, rho.n_qubits(), label, eps);
    const std::size_t pred = classify(*model_, rho);
    if (pred != label) return zero_perturbation(StateValue{rho}, label, pred);

    // Purification Psi = sum_j sqrt(l_j) e_j (x) |j> with one spare ancilla
    // level, enough to reach every sigma that can beat a rank-r one.
    const auto eig = hermitian_eigen(rho.matrix());
    const Eigen::Index d = rho.dim();
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = d - 1; i >= 0; --i)
        if (eig.values[i] > 1e-13) support.push_back(i);
    const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(support.size()) + 1, d);
    ComplexVector big = ComplexVector::Zero(d * k);
    for (std::size_t j = 0; j < support.size(); ++j) {
        const double w = std::sqrt(eig.values[support[j]]);
        for (Eigen::Index i = 0; i < d; ++i)
            big[i * k + static_cast<Eigen::Index>(j)] = w * eig.vectors(i, support[j]);
    }
    const ComplexMatrix id_k = ComplexMatrix::Identity(k, k);

    LabelSearch s;
    for (std::size_t l = 0; l < observables_.size(); ++l) {
        if (l == label) continue;
        const ComplexMatrix a = kron(observables_[l] - observables_[label], id_k);
        const QcqpResult r = max_overlap_with_constraint(big, a, opts_);
        s.f_upper = std::max(s.f_upper, r.upper);
        if (r.feasible && r.value > s.f_lower) {
            s.found = true;
            s.label = l;
            s.best = r.best;
            s.f_lower = r.value;
        }
    }

    LocalVerdict v;
    v.margin = s.found ? 1.0 - s.f_lower : 1.0;
    v.f_bar_lower = std::max(0.0, 1.0 - s.f_upper);
    if (s.found && 1.0 - s.f_lower <= eps) {
        ComplexMatrix phi(d, k);
        const ComplexVector unit = s.best.normalized();
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < k; ++j) phi(i, j) = unit[i * k + j];
        ComplexMatrix sm = phi * phi.adjoint();
        sm = 0.5 * (sm + sm.adjoint());
        sm /= sm.trace().real();
        const DensityMatrix sigma = DensityMatrix::assume_valid(sm);
        const double fbar = 1.0 - fidelity(rho, sigma);
        const std::size_t adv = classify(*model_, sigma);
        if (fbar <= eps + 1e-6 && adv != label) {
            v.status = LocalStatus::non_robust;
            v.counterexample = Counterexample{StateValue{sigma}, label, adv, fbar};
            v.margin = fbar;
        } else {
            v.status = LocalStatus::undecided;
        }
    } else if (1.0 - s.f_upper > eps) {
        v.status = LocalStatus::robust;
    } else {
        v.status = LocalStatus::undecided;
    }
    return v;
}

LocalVerdict LocalVerifier::exact(const LabeledState& x, double eps) const {
    if (const auto* p = std::get_if<PureState>(&x.state)) return exact_pure(*p, x.label, eps);
    return exact_mixed(std::get<DensityMatrix>(x.state), x.label, eps);
}

LocalVerdict rough_check(const QmlModel& model, const LabeledState& x, double eps) {
    check_inputs(model, n_qubits_of(x.state), x.label, eps);
    const ProbabilityVector p = distribution(model, x.state);
    const std::size_t pred = argmax_label(p);
    if (pred != x.label) return zero_perturbation(x.state, x.label, pred);
    double runner_up = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l)
        if (l != x.label) runner_up = std::max(runner_up, p[l]);
    LocalVerdict v;
    v.margin = p[x.label] - runner_up;
    v.status = v.margin > 2.0 * std::sqrt(eps) ? LocalStatus::robust : LocalStatus::undecided_by_rough;
    return v;
}

LocalVerdict exact_check_pure(const QmlModel& model, const PureState& psi, std::size_t label, double eps) {
    return LocalVerifier(model).exact_pure(psi, label, eps);
}

LocalVerdict exact_check_mixed(const QmlModel& model, const DensityMatrix& rho, std::size_t label, double eps) {
    return LocalVerifier(model).exact_mixed(rho, label, eps);
}

std::size_t DatasetReport::robust_count() const {
    return static_cast<std::size_t>(std::count_if(states.begin(), states.end(), [](const StateResult& s) {
        return s.verdict.status == LocalStatus::robust;
    }));
}

std::vector<Counterexample> DatasetReport::counterexamples() const {
    std::vector<Counterexample> out;
    for (const auto& s : states)
        if (s.verdict.counterexample) out.push_back(*s.verdict.counterexample);
    return out;
}

std::vector<std::size_t> DatasetReport::counterexample_indices() const {
    std::vector<std::size_t> out;
    for (const auto& s : states)
        if (s.verdict.counterexample) out.push_back(s.index);
    return out;
}

DatasetReport verify_dataset(const QmlModel& model, const std::vector<LabeledState>& data, double eps,
                             VerifyMode mode) {
    if (data.empty()) throw InputError("empty dataset");
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
    for (const auto& x : data) check_inputs(model, n_qubits_of(x.state), x.label, eps);

    const LocalVerifier verifier(model);
    DatasetReport report;
    report.mode = mode;
    report.eps = eps;
    report.states.resize(data.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::int64_t>(data.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const LabeledState& x = data[static_cast<std::size_t>(i)];
            StateResult& out = report.states[static_cast<std::size_t>(i)];
            out.index = static_cast<std::size_t>(i);
            out.label = x.label;
            out.predicted = argmax_label(distribution(model, x.state));
            out.misclassified = out.predicted != x.label;
            LocalVerdict rv = verifier.rough(x, eps);
            out.rough_status = rv.status;
            if (mode == VerifyMode::accurate && rv.status == LocalStatus::undecided_by_rough) {
                out.verdict = verifier.exact(x, eps);
            } else {
                out.verdict = std::move(rv);
            }
            out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        } catch (...) {
#pragma omp critical(qrobust_verify_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::size_t rough_ok = 0;
    for (const auto& s : report.states)
        if (s.rough_status == LocalStatus::robust) ++rough_ok;
    const double total = static_cast<double>(data.size());
    report.rough_ra = 100.0 * static_cast<double>(rough_ok) / total;
    report.accurate_ra = 100.0 * static_cast<double>(report.robust_count()) / total;
    return report;
}

}  // namespace qrobust
