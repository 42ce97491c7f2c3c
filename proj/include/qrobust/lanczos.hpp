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
#include <functional>

#include "qrobust/linalg.hpp"

namespace qrobust {

using LinearMap = std::function<ComplexVector(const ComplexVector&)>;

struct LanczosOptions {
    double tol = 1e-6;
    int max_iter = 2000;  // operator applications
    int restart_dim = 40;
    std::uint64_t seed = 20240917;
    bool check_hermitian = true;
};

struct LanczosResult {
    double lambda_min = 0.0;
    ComplexVector v_min;
    double lambda_max = 0.0;
    ComplexVector v_max;
    double residual_min = 0.0;
    double residual_max = 0.0;
    int matvecs = 0;
    int restarts = 0;
};

/// Smallest and largest eigenpairs of a Hermitian operator given only as
/// a map. Thick-restart Lanczos with full reorthogonalization, keeping
/// Ritz vectors from both ends of the spectrum at each restart. Converged
/// when both extreme Ritz values move by at most tol between restarts and
/// both residual norms are at most 10 tol. Throws ConvergenceError with the
/// best values so far once max_iter applications are used up, and
/// InputError when sampled <u, Av> and <Au, v> disagree by more than 1e-8.
LanczosResult lanczos_extremes(const LinearMap& apply, Eigen::Index dim, const LanczosOptions& opts = {});

}  // namespace qrobust
