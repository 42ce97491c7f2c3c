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

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// per-element arithmetic, so the two agree bit-for-bit. The unqualified
// entry points dispatch on problem size.

#include <cstdint>
#include <span>

#include "qrobust/linalg.hpp"

namespace qrobust::kernels {

/// Applies a 2^k x 2^k matrix in place to k bits of a length-2^N vector.
/// bits[t] is a bit position counted from the least significant bit of the
/// vector index; bits[0] maps to the most significant bit of the matrix
/// index. Positions must be distinct and < N.
using ApplyLocalFn = void (*)(std::span<Complex>, const ComplexMatrix&, std::span<const int>);

/// Row-major axis permutation: axis i of `out` is axis perm[i] of `in`.
using PermuteFn = void (*)(std::span<const Complex>, std::span<const std::int64_t>, std::span<const int>,
                           std::span<Complex>);

namespace serial {
void apply_local(std::span<Complex> data, const ComplexMatrix& u, std::span<const int> bits);
void permute(std::span<const Complex> in, std::span<const std::int64_t> dims, std::span<const int> perm,
             std::span<Complex> out);
}  // namespace serial

namespace omp {
void apply_local(std::span<Complex> data, const ComplexMatrix& u, std::span<const int> bits);
void permute(std::span<const Complex> in, std::span<const std::int64_t> dims, std::span<const int> perm,
             std::span<Complex> out);
}  // namespace omp

void apply_local(std::span<Complex> data, const ComplexMatrix& u, std::span<const int> bits);
void permute(std::span<const Complex> in, std::span<const std::int64_t> dims, std::span<const int> perm,
             std::span<Complex> out);

/// Vectors shorter than this run the serial kernel.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

/// Caps OpenMP worker count; 0 restores the runtime default.
void set_thread_count(int n);
int thread_count();

/// Reads QROBUST_THREADS (0 or unset = auto) and applies it.
void configure_threads_from_env();

}  // namespace qrobust::kernels
