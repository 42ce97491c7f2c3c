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

#include "qrobust/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qrobust/errors.hpp"

namespace qrobust {

namespace {

ComplexVector random_unit(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(normal(rng), normal(rng));
    return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first `cols` columns.
double orthogonalize(ComplexVector& w, const ComplexMatrix& v, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass) {
        if (cols == 0) break;
        const ComplexVector h = v.leftCols(cols).adjoint() * w;
        w.noalias() -= v.leftCols(cols) * h;
    }
    return w.norm();
}

}  // namespace

LanczosResult lanczos_extremes(const LinearMap& apply, Eigen::Index dim, const LanczosOptions& opts) {
    if (dim < 2) throw InputError("lanczos: dimension must be at least 2");
    if (opts.tol <= 0.0 || opts.max_iter < 1 || opts.restart_dim < 4)
        throw InputError("lanczos: invalid options");
    std::mt19937_64 rng(opts.seed);
    LanczosResult res;

    auto matvec = [&](const ComplexVector& x) {
        ComplexVector y = apply(x);
        ++res.matvecs;
        if (y.size() != dim) throw DimensionError("lanczos: operator returned a vector of the wrong length");
        return y;
    };

    if (opts.check_hermitian) {
        const ComplexVector u = random_unit(dim, rng);
        const ComplexVector w = random_unit(dim, rng);
        const Complex lhs = u.dot(matvec(w));
        const Complex rhs = matvec(u).dot(w);
        if (std::abs(lhs - rhs) > 1e-8)
            throw InputError("lanczos: operator is not Hermitian (|<u,Av> - <Au,v>| = " +
                             std::to_string(std::abs(lhs - rhs)) + ")");
    }

    const Eigen::Index m = std::min<Eigen::Index>(opts.restart_dim, dim);
    const Eigen::Index keep_each = std::max<Eigen::Index>(1, m / 4);
    ComplexMatrix v(dim, m), av(dim, m);
    Eigen::Index cols = 0;
    v.col(0) = random_unit(dim, rng);
    av.col(0) = matvec(v.col(0));
    cols = 1;

    double prev_min = std::numeric_limits<double>::quiet_NaN();
    double prev_max = prev_min;
    for (;;) {
        bool exhausted = false;
        while (cols < m) {
            ComplexVector w = av.col(cols - 1);
            const double scale = std::max(1.0, w.norm());
            const double nrm = orthogonalize(w, v, cols);
            if (nrm <= 1e-12 * scale) {
                // Krylov space is invariant: the Ritz values are exact.
                exhausted = true;
                break;
            }
            v.col(cols) = w / nrm;
            av.col(cols) = matvec(v.col(cols));
            ++cols;
            if (res.matvecs >= opts.max_iter) break;
        }

        ComplexMatrix t = v.leftCols(cols).adjoint() * av.leftCols(cols);
        t = 0.5 * (t + t.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(t);
        if (es.info() != Eigen::Success) throw ConvergenceError("lanczos: projected eigenproblem failed");
        const auto& theta = es.eigenvalues();
        const ComplexMatrix& y = es.eigenvectors();
        auto residual = [&](Eigen::Index j) {
            const ComplexVector x = v.leftCols(cols) * y.col(j);
            const ComplexVector ax = av.leftCols(cols) * y.col(j);
            return std::make_pair((ax - theta[j] * x).norm(), x);
        };
        auto [r_min, x_min] = residual(0);
        auto [r_max, x_max] = residual(cols - 1);
        res.lambda_min = theta[0];
        res.lambda_max = theta[cols - 1];
        res.v_min = x_min.normalized();
        res.v_max = x_max.normalized();
        res.residual_min = r_min;
        res.residual_max = r_max;

        const bool settled = std::abs(theta[0] - prev_min) <= opts.tol &&
                             std::abs(theta[cols - 1] - prev_max) <= opts.tol;
        const bool small_residual = r_min <= 10.0 * opts.tol && r_max <= 10.0 * opts.tol;
        if (exhausted || cols == dim || (settled && small_residual)) return res;
        if (res.matvecs >= opts.max_iter) {
            std::ostringstream msg;
            msg << "lanczos: no convergence after " << res.matvecs << " operator applications (lambda_min "
                << theta[0] << " residual " << r_min << ", lambda_max " << theta[cols - 1] << " residual " << r_max
                << ")";
            throw ConvergenceError(msg.str());
        }
        prev_min = theta[0];
        prev_max = theta[cols - 1];

        // Thick restart: keep Ritz vectors from both ends of the spectrum.
        const Eigen::Index k = std::min<Eigen::Index>(keep_each, cols / 2);
        ComplexMatrix ysel(cols, 2 * k);
        for (Eigen::Index j = 0; j < k; ++j) {
            ysel.col(j) = y.col(j);
            ysel.col(k + j) = y.col(cols - 1 - j);
        }
        const ComplexMatrix nv = v.leftCols(cols) * ysel;
        const ComplexMatrix nav = av.leftCols(cols) * ysel;
        v.leftCols(2 * k) = nv;
        av.leftCols(2 * k) = nav;
        cols = 2 * k;
        ++res.restarts;
    }
}

}  // namespace qrobust
