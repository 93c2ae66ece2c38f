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

#include "spatialq/linalg.hpp"
#include "spatialq/optsim.hpp"
#include "spatialq/qops.hpp"
#include "spatialq/synthesis.hpp"

namespace spatialq {
namespace {

// Small spots keep the window at 384^2 so the suite stays fast.
SetupConfig small_setup(int n) {
  DeskScale s;
  s.waist_pixels = 12.0;
  SetupConfig c = desk_setup(n, s);
  c.grid.nx = c.grid.ny = 384;
  c.validate();
  return c;
}

GratingDesign designed(const ComplexMatrix& t, const SetupConfig& c) {
  return optimize_for_setup(GratingDesign::from_target(t, c.layout, Decomposition::Balanced), c);
}

TEST(Fresnel, GaussianSpreadsAsPredicted) {
  GridSpec g{256, 256, 8e-6, {}};
  const double w0 = 12 * g.pitch;
  const double lambda = 1.55e-6;
  SampledField f(g);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const double r2 = g.x(ix) * g.x(ix) + g.y(iy) * g.y(iy);
      f.at(ix, iy) = std::exp(-r2 / (w0 * w0));
    }
  }
  const double zr = kPi * w0 * w0 / lambda;
  const SampledField p = fresnel_propagate(f, zr, lambda);
  EXPECT_NEAR(p.power(), f.power(), 1e-10 * f.power());
  double m2 = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) m2 += std::norm(p.at(ix, iy)) * g.x(ix) * g.x(ix);
  }
  m2 *= g.pitch * g.pitch / p.power();
  // <x^2> = w(z)^2 / 4 with w(zR) = sqrt(2) w0.
  EXPECT_NEAR(m2, 0.5 * w0 * w0, 1e-3 * w0 * w0);
}

TEST(Fresnel, SteepTiltIsRejected) {
  GridSpec g{128, 128, 8e-6, {}};
  SampledField f(g);
  const double kx = 0.97 * kPi / g.pitch;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const double r2 = g.x(ix) * g.x(ix) + g.y(iy) * g.y(iy);
      f.at(ix, iy) = std::polar(std::exp(-r2 / std::pow(10 * g.pitch, 2)), kx * g.x(ix));
    }
  }
  EXPECT_THROW(fresnel_propagate(f, 1e-3, 1.55e-6), AliasingError);
}

TEST(Setup, CoarseGridIsRejected) {
  SetupConfig c = desk_setup(15);
  c.grid.pitch *= 2.0;
  c.grid.nx = c.grid.ny = 512;
  EXPECT_THROW(c.validate(), AliasingError);
  EXPECT_LT(c.band_limit_pitch(), c.grid.pitch);
}

TEST(Setup, BadParametersAreRejected) {
  SetupConfig c = small_setup(3);
  c.modulation_efficiency = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = small_setup(3);
  c.grating_period = 1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Setup, JsonRoundTrip) {
  SetupConfig c = small_setup(5);
  c.use_blazed_carrier = true;
  c.modulation_efficiency = 0.4;
  const SetupConfig r = setup_from_json(setup_to_json(c));
  EXPECT_EQ(r.grid, c.grid);
  EXPECT_EQ(r.use_blazed_carrier, true);
  EXPECT_DOUBLE_EQ(r.modulation_efficiency, 0.4);
  EXPECT_DOUBLE_EQ(r.layout.focal, c.layout.focal);
}

TEST(Train, IdentityPassesUnchanged) {
  const SetupConfig c = small_setup(3);
  const OpticalTrain train(c);
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  EXPECT_GT(matrix_fidelity(train.transfer_matrix(designed(id, c)), id), 0.99999);
}

TEST(Train, OddQftAndRandomUnitary) {
  auto rng = split_rng(8, 0);
  for (int n : {3, 5}) {
    const SetupConfig c = small_setup(n);
    const OpticalTrain train(c);
    const ComplexMatrix f = qft_matrix(n);
    EXPECT_GT(matrix_fidelity(train.transfer_matrix(designed(f, c)), f), 0.9999) << n;
    const ComplexMatrix u = random_unitary(n, rng);
    EXPECT_GT(matrix_fidelity(train.transfer_matrix(designed(u, c)), u), 0.999) << n;
  }
}

TEST(Train, IsLinearInTheLaunchedField) {
  auto rng = split_rng(9, 0);
  const SetupConfig c = small_setup(3);
  const OpticalTrain train(c);
  const GratingDesign d = designed(random_unitary(3, rng), c);
  const ComplexMatrix t = train.transfer_matrix(d);
  const StateVector a = random_state(3, rng);
  const StateVector out = train.propagate(d, train.ideal_launch(a));
  EXPECT_LT((out - t * a).norm(), 1e-9 * out.norm());
}

TEST(Train, PreparedLaunchMatchesTransferColumn) {
  const SetupConfig c = small_setup(3);
  const OpticalTrain train(c);
  const GratingDesign d = designed(qft_matrix(3), c);
  const ComplexMatrix t = train.transfer_matrix(d);
  const StateVector psi = fourier_basis(3).col(1);
  const StateVector out = train.run(d, optimize_prep(psi, c));
  const StateVector ref = t * psi;
  EXPECT_GT(std::norm(ref.dot(out)) / (ref.squaredNorm() * out.squaredNorm()), 0.999);
}

TEST(Train, ModulationEfficiencyOnlyScales) {
  SetupConfig c = small_setup(3);
  const GratingDesign d = designed(qft_matrix(3), c);
  const ComplexMatrix full = OpticalTrain(c).transfer_matrix(d);
  c.modulation_efficiency = 0.5;
  const ComplexMatrix half = OpticalTrain(c).transfer_matrix(d);
  EXPECT_NEAR(matrix_fidelity(half, full), 1.0, 1e-9);
  EXPECT_LT(half.squaredNorm(), full.squaredNorm());
}

TEST(Train, PhaseErrorIsApplied) {
  SetupConfig c = small_setup(3);
  const GratingDesign d = designed(qft_matrix(3), c);
  RealMatrix eps = RealMatrix::Zero(3, 3);
  eps(1, 2) = 0.8;
  c.phase_error = eps;
  const ComplexMatrix t = OpticalTrain(c).transfer_matrix(d);
  ComplexMatrix expect = qft_matrix(3);
  expect(1, 2) *= std::polar(1.0, 0.8);
  EXPECT_GT(matrix_fidelity(t, expect), 0.999);
  EXPECT_LT(matrix_fidelity(t, qft_matrix(3)), 0.99);
}

TEST(Train, PlaneDumpNamesEachPlane) {
  const SetupConfig c = small_setup(3);
  const OpticalTrain train(c);
  PlaneFields planes;
  train.propagate(designed(qft_matrix(3), c), train.ideal_launch(StateVector::Ones(3)), &planes);
  EXPECT_GE(planes.planes.size(), 3u);
}

}  // namespace
}  // namespace spatialq
