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

#include <gtest/gtest.h>

#include "spatialq/calib.hpp"
#include "spatialq/linalg.hpp"
#include "spatialq/qops.hpp"
#include "spatialq/synthesis.hpp"

namespace spatialq {
namespace {

PhaseErrorMap recover(const ComplexMatrix& target, const ComplexMatrix& implemented) {
  const RealMatrix mags = estimate_magnitudes(basis_intensities(implemented));
  return phase_error_from(target, recover_phases(probe_intensities(implemented), mags));
}

TEST(Probes, TwoPerColumnBeyondTheFirst) {
  const auto p = probe_vectors(5);
  ASSERT_EQ(p.size(), 8u);
  EXPECT_EQ(p[0], (StateVector(5) << 1, 1, 0, 0, 0).finished());
  EXPECT_EQ(p[1], (StateVector(5) << Complex(0, 1), 1, 0, 0, 0).finished());
}

TEST(Calibration, MagnitudesFromBasisLaunches) {
  auto rng = split_rng(1, 0);
  const ComplexMatrix t = random_complex_matrix(4, 4, rng);
  EXPECT_LT((estimate_magnitudes(basis_intensities(t)) - t.cwiseAbs()).norm(), 1e-12);
}

TEST(Calibration, RecoversInjectedErrorsUpToRowPhases) {
  auto rng = split_rng(2, 0);
  const ComplexMatrix f = qft_matrix(15);
  for (int trial = 0; trial < 10; ++trial) {
    const PhaseErrorMap eps = PhaseErrorMap::random(15, kPi, rng);
    const PhaseErrorMap got = recover(f, apply_phase_error(f, eps));
    EXPECT_LT(phase_map_distance(got, eps), 1e-9);
    const ComplexMatrix closed = apply_phase_error(compensate(f, got), eps);
    EXPECT_GT(row_phase_fidelity(closed, f), 0.9999);
  }
}

TEST(Calibration, WorksForAnyMatrixWithoutZeros) {
  auto rng = split_rng(3, 0);
  const ComplexMatrix t = random_unitary(6, rng);
  const PhaseErrorMap eps = PhaseErrorMap::random(6, 2.0, rng);
  EXPECT_LT(phase_map_distance(recover(t, apply_phase_error(t, eps)), eps), 1e-8);
}

TEST(Calibration, ZeroReferenceColumnIsRejected) {
  ComplexMatrix t = qft_matrix(3);
  t(1, 0) = 0.0;
  const RealMatrix mags = estimate_magnitudes(basis_intensities(t));
  EXPECT_THROW(recover_phases(probe_intensities(t), mags), InvalidArgument);
}

TEST(Calibration, RowPhaseFidelityIgnoresRowPhases) {
  const ComplexMatrix f = qft_matrix(5);
  ComplexMatrix g = f;
  for (int m = 0; m < 5; ++m) g.row(m) *= std::polar(1.0, 0.7 * m);
  EXPECT_NEAR(row_phase_fidelity(g, f), 1.0, 1e-12);
  EXPECT_LT(matrix_fidelity(g, f), 0.9);
}

TEST(Calibration, JsonRoundTrip) {
  auto rng = split_rng(4, 0);
  const PhaseErrorMap e = PhaseErrorMap::random(4, 1.0, rng);
  EXPECT_EQ(phase_map_from_json(phase_map_to_json(e)).eps, e.eps);
}

}  // namespace
}  // namespace spatialq
