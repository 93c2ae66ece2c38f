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
#include "spatialq/qops.hpp"
#include "spatialq/synthesis.hpp"

namespace spatialq {
namespace {

class Decompose : public ::testing::TestWithParam<Decomposition> {};

TEST_P(Decompose, FactorsMultiplyBack) {
  auto rng = split_rng(1, 0);
  for (int n : {1, 3, 8}) {
    const ComplexMatrix t = random_complex_matrix(n, n, rng);
    const HadamardFactors f = hadamard_decompose(t, GetParam());
    EXPECT_LT((f.a.cwiseProduct(f.b) - t).norm(), 1e-12 * t.norm());
  }
}

INSTANTIATE_TEST_SUITE_P(Synthesis, Decompose,
                         ::testing::Values(Decomposition::Symmetric, Decomposition::Balanced));

TEST(Decompose, BalancedEqualizesColumnAndRowPower) {
  auto rng = split_rng(2, 0);
  const ComplexMatrix t = random_complex_matrix(6, 6, rng);
  const HadamardFactors f = hadamard_decompose(t, Decomposition::Balanced);
  const RealVector cols = f.a.cwiseAbs2().colwise().sum();
  const RealVector rows = f.b.cwiseAbs2().rowwise().sum();
  EXPECT_LT((cols.array() - cols.mean()).abs().maxCoeff(), 1e-8 * cols.mean());
  EXPECT_LT((rows.array() - rows.mean()).abs().maxCoeff(), 1e-8 * rows.mean());
}

TEST(Fidelity, Properties) {
  auto rng = split_rng(3, 0);
  const ComplexMatrix x = random_complex_matrix(5, 5, rng);
  const ComplexMatrix y = random_complex_matrix(5, 5, rng);
  EXPECT_NEAR(matrix_fidelity(x, x), 1.0, 1e-14);
  EXPECT_NEAR(matrix_fidelity(Complex(0, 2.5) * x, x), 1.0, 1e-14);
  const double f = matrix_fidelity(x, y);
  EXPECT_GE(f, 0.0);
  EXPECT_LE(f, 1.0);
  EXPECT_NEAR(f, matrix_fidelity(y, x), 1e-14);
  EXPECT_NEAR(matrix_efficiency(0.5 * x, x), 0.25, 1e-14);
  EXPECT_THROW(matrix_fidelity(x, ComplexMatrix::Zero(5, 5)), InvalidArgument);
}

TEST(Aperture, WeightsSumToOne) {
  const ModeLayout l = desk_circle_layout(5);
  for (auto w : {Weighting::Uniform, Weighting::Mode}) {
    const ApertureSamples s = sample_aperture(l, 8e-6, w);
    EXPECT_NEAR(s.weights.sum(), 1.0, 1e-12);
    for (const Vec2& o : s.offsets) EXPECT_LT(o.norm(), l.aperture_radius);
  }
}

TEST(FitGrating, AdjointGradientMatchesFiniteDifference) {
  auto rng = split_rng(4, 0);
  const ModeLayout l = desk_circle_layout(5);
  const GratingDesign d = GratingDesign::from_target(random_unitary(5, rng), l);
  const ApertureSamples s = sample_aperture(l, 8e-6);
  const GratingBasis basis(d, Side::Splitter, 2, s);
  const ComplexVector f = d.factor(Side::Splitter, 2);
  ComplexVector z = ComplexVector::Ones(5);
  z[1] = Complex(0.7, 0.3);
  ComplexVector g;
  basis.fidelity(z, f, &g);
  const double h = 1e-6;
  for (int j = 0; j < 5; ++j) {
    ComplexVector zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    const double re = (basis.fidelity(zp, f) - basis.fidelity(zm, f)) / (2 * h);
    zp = z;
    zm = z;
    zp[j] += Complex(0, h);
    zm[j] -= Complex(0, h);
    const double im = (basis.fidelity(zp, f) - basis.fidelity(zm, f)) / (2 * h);
    EXPECT_NEAR(g[j].real(), re, 1e-6);
    EXPECT_NEAR(g[j].imag(), im, 1e-6);
  }
}

TEST(FitGrating, ObjectiveNeverIncreases) {
  auto rng = split_rng(5, 0);
  const ModeLayout l = desk_circle_layout(7);
  const GratingDesign d = GratingDesign::from_target(random_complex_matrix(7, 7, rng), l);
  const GratingBasis basis(d, Side::Splitter, 0, sample_aperture(l, 8e-6));
  OptimizeOptions o;
  o.warm_start_iterations = 0;
  const CoefficientFit fit = fit_grating(basis, d.factor(Side::Splitter, 0), ComplexVector::Ones(7), o);
  ASSERT_FALSE(fit.history.empty());
  for (std::size_t i = 1; i < fit.history.size(); ++i) {
    EXPECT_LE(fit.history[i], fit.history[i - 1] + 1e-15);
  }
  EXPECT_GE(fit.fidelity, fit.initial_fidelity);
}

TEST(Synthesize, IdentityIsExact) {
  const auto [d, r] = synthesize(ComplexMatrix::Identity(4, 4), desk_circle_layout(4));
  EXPECT_NEAR(r.fidelity_t, 1.0, 1e-6);
}

TEST(Synthesize, RandomTargetsReachHighFidelity) {
  auto rng = split_rng(6, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const ComplexMatrix t = random_complex_matrix(5, 5, rng);
    SynthesisOptions o;
    o.optimize = false;
    const auto [d0, r0] = synthesize(t, desk_circle_layout(5), o);
    const auto [d1, r1] = synthesize(t, desk_circle_layout(5));
    EXPECT_GE(r1.fidelity_a, 0.999);
    EXPECT_GE(r1.fidelity_a, r0.fidelity_a);
    EXPECT_GT(r1.efficiency_a, 0.98 * r0.efficiency_a);
  }
}

TEST(Synthesize, SampledGratingReextracts) {
  const ModeLayout l = desk_circle_layout(5);
  const ComplexMatrix t = qft_matrix(5);
  SynthesisOptions o;
  o.decomposition = Decomposition::Balanced;
  const auto [d, r] = synthesize(t, l, o);
  GridSpec g;
  g.nx = g.ny = 512;
  std::vector<SampledField> gratings;
  for (int n = 0; n < 5; ++n) gratings.push_back(phase_only_grating(d, Side::Splitter, n, g));
  const ComplexMatrix a = extract_matrix(gratings, d, Side::Splitter);
  EXPECT_NEAR(matrix_fidelity(a, normalized_factor(d, Side::Splitter)), r.fidelity_a, 1e-3);
}

TEST(Synthesize, ReportSerializes) {
  const auto [d, r] = synthesize(ComplexMatrix::Identity(2, 2), desk_circle_layout(2));
  const auto j = report_to_json(r);
  EXPECT_TRUE(j.contains("fidelity_T"));
}

}  // namespace
}  // namespace spatialq
