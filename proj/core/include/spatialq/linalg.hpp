// Copyright 2026 The spatialq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

#include "spatialq/types.hpp"

namespace spatialq {

/// Element-wise (Hadamard) product.
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);

/// max |U^dagger U - I| over all entries.
double unitarity_defect(const ComplexMatrix& u);

bool is_hermitian(const ComplexMatrix& m, double tol);

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
/// phase of R's diagonal divided out).
ComplexMatrix random_unitary(int n, std::mt19937_64& rng);

/// Matrix with i.i.d. standard complex Gaussian entries.
ComplexMatrix random_complex_matrix(int rows, int cols, std::mt19937_64& rng);

/// Haar-random unit vector.
ComplexVector random_state(int n, std::mt19937_64& rng);

/// Principal square root of a Hermitian PSD matrix; negative eigenvalues are
/// clipped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Derive an independent generator for sub-task `stream` of a master seed.
/// Parallel and serial callers that use the same (seed, stream) pairs agree.
std::mt19937_64 split_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace spatialq
