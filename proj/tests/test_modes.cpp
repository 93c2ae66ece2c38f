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

#include "spatialq/fft.hpp"
#include "spatialq/linalg.hpp"
#include "spatialq/modes.hpp"

namespace spatialq {
namespace {

GridSpec small_grid() { return {256, 256, 8e-6, {}}; }

ModeLayout small_layout(int n) {
  DeskScale s;
  s.waist_pixels = 8.0;
  return desk_circle_layout(n, s);
}

TEST(Layout, DeskFocalIsConfocal) {
  const ModeLayout l = desk_circle_layout(15);
  const double w0 = 28 * 8e-6;
  EXPECT_NEAR(l.waist, w0, 1e-15);
  EXPECT_NEAR(l.focal, kPi * w0 * w0 / (2 * 1.55e-6), 1e-12);
  EXPECT_NEAR(l.min_separation() / l.waist, 5.5, 1e-9);
  EXPECT_NO_THROW(l.validate());
}

TEST(Layout, CircleIsEquallySpaced) {
  const ModeLayout l = circle_layout(7, 1e-3, 5e-5, 0.05, 1.55e-6);
  for (int n = 0; n < 7; ++n) {
    EXPECT_NEAR(l.coords[n].norm(), 1e-3, 1e-15);
  }
  EXPECT_NEAR(l.min_separation(), l.max_separation() > 0 ? 2e-3 * std::sin(kPi / 7) : 0, 1e-12);
}

TEST(Layout, OverlappingSpotsAreRejected) {
  EXPECT_THROW(circle_layout(8, 1e-4, 1e-4, 0.05, 1.55e-6), InvalidArgument);
  ModeLayout l = small_layout(5);
  l.aperture_radius = l.min_separation();
  EXPECT_THROW(l.validate(), InvalidArgument);
}

TEST(Layout, JsonRoundTrip) {
  const ModeLayout l = small_layout(5);
  const ModeLayout r = layout_from_json(layout_to_json(l));
  ASSERT_EQ(r.size(), l.size());
  EXPECT_DOUBLE_EQ(r.waist, l.waist);
  EXPECT_DOUBLE_EQ(r.focal, l.focal);
  EXPECT_DOUBLE_EQ(r.aperture_radius, l.aperture_radius);
  for (int n = 0; n < l.size(); ++n) EXPECT_DOUBLE_EQ(r.coords[n].x, l.coords[n].x);
}

TEST(Modes, GramIsNearIdentity) {
  const ModeLayout l = small_layout(5);
  const ComplexMatrix g = mode_gram_matrix(l, small_grid());
  const ComplexMatrix d = g - ComplexMatrix::Identity(5, 5);
  EXPECT_LT(d.cwiseAbs().maxCoeff(), kMaxModeOverlap);
}

TEST(Modes, ProjectionInvertsEncoding) {
  auto rng = split_rng(3, 0);
  const ModeLayout l = small_layout(5);
  const StateVector a = random_state(5, rng);
  const StateVector back = project_onto_modes(encode_state(a, l, small_grid()), l);
  EXPECT_LT((back - a).norm(), 1e-4);
}

TEST(Modes, CoarseGridIsRejected) {
  const ModeLayout l = small_layout(3);
  GridSpec g = small_grid();
  g.pitch = l.waist / 3;
  EXPECT_THROW(mode_field(l, 0, g), InvalidArgument);
}

TEST(Fft, RoundTripAndParseval) {
  auto rng = split_rng(5, 0);
  const ComplexMatrix m = random_complex_matrix(64, 32, rng);
  std::vector<Complex> v(m.data(), m.data() + m.size());
  const std::vector<Complex> orig = v;
  Fft2 f(32, 64);
  f.forward(v);
  double e_k = 0, e_x = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e_k += std::norm(v[i]);
    e_x += std::norm(orig[i]);
  }
  EXPECT_NEAR(e_k / v.size(), e_x, 1e-9 * e_x);
  f.inverse(v);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_LT(std::abs(v[i] - orig[i]), 1e-12);
}

TEST(Fft, SizeMismatchThrows) {
  std::vector<Complex> v(10);
  EXPECT_THROW(Fft2(4, 4).forward(v), InvalidArgument);
}

TEST(Linalg, HaarUnitaryIsUnitary) {
  auto rng = split_rng(7, 1);
  for (int n : {1, 2, 15, 40}) EXPECT_LT(unitarity_defect(random_unitary(n, rng)), 1e-12);
}

TEST(Linalg, SplitRngIsReproducible) {
  auto a = split_rng(11, 4);
  auto b = split_rng(11, 4);
  auto c = split_rng(11, 5);
  EXPECT_EQ(a(), b());
  EXPECT_NE(split_rng(11, 4)(), c());
}

TEST(Linalg, PsdSqrtSquares) {
  auto rng = split_rng(2, 2);
  const ComplexMatrix x = random_complex_matrix(6, 6, rng);
  const ComplexMatrix p = x * x.adjoint();
  const ComplexMatrix s = psd_sqrt(p);
  EXPECT_TRUE(is_hermitian(s, 1e-10));
  EXPECT_LT((s * s - p).norm(), 1e-9 * p.norm());
}

}  // namespace
}  // namespace spatialq
