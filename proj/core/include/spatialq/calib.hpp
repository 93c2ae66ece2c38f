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

#include <nlohmann/json.hpp>
#include <random>
#include <vector>

#include "spatialq/types.hpp"

namespace spatialq {

/// Constant phase offsets eps(m, n) picked up by the implemented matrix.
struct PhaseErrorMap {
  RealMatrix eps;

  int size() const { return static_cast<int>(eps.rows()); }
  static PhaseErrorMap zero(int n) { return {RealMatrix::Zero(n, n)}; }
  /// Entries uniform in [-amplitude, amplitude].
  static PhaseErrorMap random(int n, double amplitude, std::mt19937_64& rng);
};

nlohmann::json phase_map_to_json(const PhaseErrorMap& e);
PhaseErrorMap phase_map_from_json(const nlohmann::json& j);

/// T(m, n) * exp(i eps(m, n)).
ComplexMatrix apply_phase_error(const ComplexMatrix& t, const PhaseErrorMap& err);

/// T(m, n) * exp(-i eps(m, n)).
ComplexMatrix compensate(const ComplexMatrix& target, const PhaseErrorMap& err);

/// Input vectors e0 + ej and i e0 + ej for j = 1..N-1, interleaved per j.
std::vector<StateVector> probe_vectors(int n);

/// Output powers |T v|^2 for every probe.
std::vector<RealVector> probe_intensities(const ComplexMatrix& t);

/// Element magnitudes from single-column launches: |T(m, n)| = sqrt(I_n(m)).
RealMatrix estimate_magnitudes(const std::vector<RealVector>& basis_intensities);

/// Powers for basis launches e0..e(N-1).
std::vector<RealVector> basis_intensities(const ComplexMatrix& t);

/// Phase of every element relative to the first element of its row; the
/// first column comes back as zero.
PhaseErrorMap recover_phases(const std::vector<RealVector>& intensities,
                             const RealMatrix& magnitudes);

/// Error map from measured relative phases and the matrix that was meant to be
/// implemented. Row offsets are fixed so that the first column reads zero.
PhaseErrorMap phase_error_from(const ComplexMatrix& target, const PhaseErrorMap& measured);

/// Residual of two maps after removing the best constant offset per row,
/// as a max over entries of the wrapped difference.
double phase_map_distance(const PhaseErrorMap& a, const PhaseErrorMap& b);

/// matrix_fidelity after aligning a free phase on every row.
double row_phase_fidelity(const ComplexMatrix& x_exp, const ComplexMatrix& x);

}  // namespace spatialq
