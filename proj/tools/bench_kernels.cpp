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

// Serial vs OpenMP kernels. Arguments: state-vector qubit count for
// apply_local, tensor rank (all axes of size 2) for permute.

#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "qrobust/kernels.hpp"

namespace {

using namespace qrobust;

std::vector<Complex> random_data(std::size_t n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<Complex> v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

ComplexMatrix random_local(Eigen::Index dim) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    ComplexMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

template <kernels::ApplyLocalFn Fn>
void apply_two_qubit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto data = random_data(std::size_t{1} << n);
    const ComplexMatrix u = random_local(4);
    const std::vector<int> bits{n - 1, n / 2};
    for (auto _ : state) {
        Fn(data, u, bits);
        benchmark::DoNotOptimize(data.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(data.size() * sizeof(Complex)));
}

template <kernels::PermuteFn Fn>
void reverse_axes(benchmark::State& state) {
    const int rank = static_cast<int>(state.range(0));
    const auto in = random_data(std::size_t{1} << rank);
    std::vector<Complex> out(in.size());
    std::vector<std::int64_t> dims(static_cast<std::size_t>(rank), 2);
    std::vector<int> perm(static_cast<std::size_t>(rank));
    std::iota(perm.rbegin(), perm.rend(), 0);
    for (auto _ : state) {
        Fn(in, dims, perm, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(in.size() * sizeof(Complex)));
}

}  // namespace

BENCHMARK(apply_two_qubit<kernels::serial::apply_local>)->Name("apply_local/serial")->DenseRange(12, 22, 5);
BENCHMARK(apply_two_qubit<kernels::omp::apply_local>)->Name("apply_local/omp")->DenseRange(12, 22, 5)->UseRealTime();
BENCHMARK(reverse_axes<kernels::serial::permute>)->Name("permute/serial")->DenseRange(12, 22, 5);
BENCHMARK(reverse_axes<kernels::omp::permute>)->Name("permute/omp")->DenseRange(12, 22, 5)->UseRealTime();

BENCHMARK_MAIN();
