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

#include "qrobust/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qrobust/errors.hpp"

namespace qrobust::kernels {

namespace {

struct LocalPlan {
    std::vector<int> sorted_bits;
    std::vector<std::size_t> offsets;  // one per matrix index
    std::size_t groups = 0;
    std::size_t local_dim = 0;
};

LocalPlan make_plan(std::size_t size, const ComplexMatrix& u, std::span<const int> bits) {
    const int k = static_cast<int>(bits.size());
    const std::size_t local_dim = std::size_t{1} << k;
    if (u.rows() != static_cast<Eigen::Index>(local_dim) || u.cols() != u.rows())
        throw DimensionError("apply_local: operator size does not match target count");
    int n = qubits_of(static_cast<Eigen::Index>(size));
    if (n < 0) throw DimensionError("apply_local: vector length is not a power of two");
    LocalPlan plan;
    plan.sorted_bits.assign(bits.begin(), bits.end());
    std::sort(plan.sorted_bits.begin(), plan.sorted_bits.end());
    for (std::size_t i = 0; i < plan.sorted_bits.size(); ++i) {
        if (plan.sorted_bits[i] < 0 || plan.sorted_bits[i] >= n ||
            (i > 0 && plan.sorted_bits[i] == plan.sorted_bits[i - 1]))
            throw DimensionError("apply_local: target bits must be distinct and in range");
    }
    plan.local_dim = local_dim;
    plan.groups = size >> k;
    plan.offsets.resize(local_dim);
    for (std::size_t j = 0; j < local_dim; ++j) {
        std::size_t off = 0;
        for (int t = 0; t < k; ++t)
            if ((j >> (k - 1 - t)) & 1U) off |= std::size_t{1} << bits[static_cast<std::size_t>(t)];
        plan.offsets[j] = off;
    }
    return plan;
}

inline std::size_t spread(std::size_t g, const std::vector<int>& sorted_bits) {
    for (int p : sorted_bits) {
        const std::size_t low = g & ((std::size_t{1} << p) - 1);
        g = ((g >> p) << (p + 1)) | low;
    }
    return g;
}

inline void apply_group(Complex* data, const ComplexMatrix& u, const LocalPlan& plan, std::size_t g,
                        Complex* in, Complex* out) {
    const std::size_t base = spread(g, plan.sorted_bits);
    for (std::size_t j = 0; j < plan.local_dim; ++j) in[j] = data[base + plan.offsets[j]];
    for (std::size_t r = 0; r < plan.local_dim; ++r) {
        Complex acc{0.0, 0.0};
        for (std::size_t c = 0; c < plan.local_dim; ++c)
            acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
        out[r] = acc;
    }
    for (std::size_t j = 0; j < plan.local_dim; ++j) data[base + plan.offsets[j]] = out[j];
}

struct PermutePlan {
    std::vector<std::int64_t> out_dims;
    std::vector<std::int64_t> in_strides;  // stride in `in` of each out axis
    std::size_t total = 1;
};

PermutePlan make_permute_plan(std::size_t in_size, std::span<const std::int64_t> dims,
                              std::span<const int> perm, std::size_t out_size) {
    const std::size_t rank = dims.size();
    if (perm.size() != rank) throw DimensionError("permute: rank mismatch");
    std::vector<std::int64_t> strides(rank, 1);
    for (std::size_t i = rank; i-- > 1;) strides[i - 1] = strides[i] * dims[i];
    PermutePlan plan;
    plan.out_dims.resize(rank);
    plan.in_strides.resize(rank);
    std::vector<bool> seen(rank, false);
    for (std::size_t i = 0; i < rank; ++i) {
        int a = perm[i];
        if (a < 0 || static_cast<std::size_t>(a) >= rank || seen[static_cast<std::size_t>(a)])
            throw DimensionError("permute: not a permutation");
        seen[static_cast<std::size_t>(a)] = true;
        plan.out_dims[i] = dims[static_cast<std::size_t>(a)];
        plan.in_strides[i] = strides[static_cast<std::size_t>(a)];
        plan.total *= static_cast<std::size_t>(dims[i]);
    }
    if (in_size != plan.total || out_size != plan.total) throw DimensionError("permute: buffer size mismatch");
    return plan;
}

// Odometer walk over output elements [begin, end).
void permute_range(const Complex* in, Complex* out, const PermutePlan& plan, std::size_t begin, std::size_t end) {
    const std::size_t rank = plan.out_dims.size();
    std::vector<std::int64_t> idx(rank, 0);
    std::size_t src = 0;
    std::size_t rest = begin;
    for (std::size_t i = rank; i-- > 0;) {
        const auto d = static_cast<std::size_t>(plan.out_dims[i]);
        idx[i] = static_cast<std::int64_t>(rest % d);
        src += (rest % d) * static_cast<std::size_t>(plan.in_strides[i]);
        rest /= d;
    }
    for (std::size_t o = begin; o < end; ++o) {
        out[o] = in[src];
        for (std::size_t i = rank; i-- > 0;) {
            if (++idx[i] < plan.out_dims[i]) {
                src += static_cast<std::size_t>(plan.in_strides[i]);
                break;
            }
            src -= static_cast<std::size_t>(plan.in_strides[i] * (plan.out_dims[i] - 1));
            idx[i] = 0;
        }
    }
}

}  // namespace

namespace serial {

void apply_local(std::span<Complex> data, const ComplexMatrix& u, std::span<const int> bits) {
    const LocalPlan plan = make_plan(data.size(), u, bits);
    std::vector<Complex> in(plan.local_dim), out(plan.local_dim);
    for (std::size_t g = 0; g < plan.groups; ++g) apply_group(data.data(), u, plan, g, in.data(), out.data());
}

void permute(std::span<const Complex> in, std::span<const std::int64_t> dims, std::span<const int> perm,
             std::span<Complex> out) {
    const PermutePlan plan = make_permute_plan(in.size(), dims, perm, out.size());
    permute_range(in.data(), out.data(), plan, 0, plan.total);
}

}  // namespace serial

namespace omp {

void apply_local(std::span<Complex> data, const ComplexMatrix& u, std::span<const int> bits) {
    const LocalPlan plan = make_plan(data.size(), u, bits);
    const auto groups = static_cast<std::int64_t>(plan.groups);
#pragma omp parallel
    {
        std::vector<Complex> in(plan.local_dim), out(plan.local_dim);
#pragma omp for schedule(static)
        for (std::int64_t g = 0; g < groups; ++g)
            apply_group(data.data(), u, plan, static_cast<std::size_t>(g), in.data(), out.data());
    }
}

void permute(std::span<const Complex> in, std::span<const std::int64_t> dims, std::span<const int> perm,
             std::span<Complex> out) {
    const PermutePlan plan = make_permute_plan(in.size(), dims, perm, out.size());
    constexpr std::size_t block = 4096;
    const auto blocks = static_cast<std::int64_t>((plan.total + block - 1) / block);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * block;
        permute_range(in.data(), out.data(), plan, begin, std::min(begin + block, plan.total));
    }
}

}  // namespace omp

void apply_local(std::span<Complex> data, const ComplexMatrix& u, std::span<const int> bits) {
    if (data.size() >= kParallelThreshold && thread_count() > 1)
        omp::apply_local(data, u, bits);
    else
        serial::apply_local(data, u, bits);
}

void permute(std::span<const Complex> in, std::span<const std::int64_t> dims, std::span<const int> perm,
             std::span<Complex> out) {
    if (in.size() >= kParallelThreshold && thread_count() > 1)
        omp::permute(in, dims, perm, out);
    else
        serial::permute(in, dims, perm, out);
}

void set_thread_count(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
    (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void configure_threads_from_env() {
    const char* raw = std::getenv("QROBUST_THREADS");
    if (raw == nullptr || *raw == '\0') return;
    int n = 0;
    try {
        n = std::stoi(raw);
    } catch (const std::exception&) {
        throw InputError(std::string("QROBUST_THREADS must be a non-negative integer, got '") + raw + "'");
    }
    if (n < 0) throw InputError("QROBUST_THREADS must be a non-negative integer");
    set_thread_count(n);
}

}  // namespace qrobust::kernels
