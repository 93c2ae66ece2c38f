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

#include <filesystem>
#include <set>

#include "spatialq/linalg.hpp"
#include "spatialq/qops.hpp"

namespace spatialq {
namespace {

TEST(Qft, UnitaryAndInvertsFourierBasis) {
  for (int n : {1, 2, 7, 15}) {
    const ComplexMatrix f = qft_matrix(n);
    EXPECT_LT(unitarity_defect(f), 1e-12);
    EXPECT_LT((f * fourier_basis(n) - ComplexMatrix::Identity(n, n)).norm(), 1e-12);
  }
  EXPECT_NEAR(std::arg(qft_matrix(4)(1, 1)), kPi / 2, 1e-12);
}

TEST(Weyl, CommutationAndOrder) {
  const int d = 5;
  const Complex w = std::polar(1.0, kTwoPi / d);
  const ComplexMatrix x = shift_matrix(d, 1);
  const ComplexMatrix z = clock_matrix(d, 1);
  EXPECT_LT((z * x - w * x * z).norm(), 1e-12);
  ComplexMatrix p = ComplexMatrix::Identity(d, d);
  for (int i = 0; i < d; ++i) p = p * x;
  EXPECT_LT((p - ComplexMatrix::Identity(d, d)).norm(), 1e-12);
  EXPECT_THROW(shift_matrix(d, d), InvalidArgument);
}

TEST(Weyl, DisplacementsAreTraceOrthogonal) {
  const int d = 4;
  for (int a = 0; a < d * d; ++a) {
    for (int b = 0; b < d * d; ++b) {
      const Complex t = (displacement_operator(d, a / d, a % d).adjoint() *
                         displacement_operator(d, b / d, b % d))
                            .trace();
      EXPECT_NEAR(std::abs(t), a == b ? d : 0.0, 1e-10);
    }
  }
}

TEST(Sic, FiducialsForSmallDimensions) {
  for (int d = 2; d <= 8; ++d) {
    const ComplexVector psi = find_sic_fiducial(d);
    EXPECT_LT(sic_deviation(psi), 1e-6) << d;
    const PovmSet povm = sic_povm(d, psi);
    EXPECT_EQ(povm.size(), static_cast<std::size_t>(d * d));
    EXPECT_LT(povm.completeness_residual(), 1e-10) << d;
  }
}

TEST(Sic, ProbabilitiesSumToOne) {
  const PovmSet povm = sic_povm(3, find_sic_fiducial(3));
  auto rng = split_rng(1, 0);
  const ComplexVector v = random_state(3, rng);
  const RealVector p = povm.probabilities(v * v.adjoint());
  EXPECT_NEAR(p.sum(), 1.0, 1e-10);
  EXPECT_GE(p.minCoeff(), 0.0);
}

TEST(Sic, NonFiducialIsRejected) {
  ComplexVector e = ComplexVector::Zero(4);
  e[0] = 1.0;
  EXPECT_GT(sic_deviation(e), 0.1);
  EXPECT_THROW(sic_povm(4, e), InvalidArgument);
}

TEST(Sic, CacheRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "spatialq_sic_cache_test";
  std::filesystem::remove_all(dir);
  const ComplexVector a = load_or_find_sic_fiducial(4, dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "sic_d4.json"));
  const ComplexVector b = load_or_find_sic_fiducial(4, dir.string());
  EXPECT_LT((a - b).norm(), 1e-15);
  std::filesystem::remove_all(dir);
}

TEST(Bell, OrthonormalAndReachable) {
  const int n = 4;
  const BipartiteState root = bell_state(n, 0, 0);
  for (int a = 0; a < n * n; ++a) {
    const BipartiteState s = bell_state(n, a / n, a % n);
    const BipartiteState moved =
        apply_local(ComplexMatrix::Identity(n, n), shift_matrix(n, a / n) * clock_matrix(n, a % n), root);
    EXPECT_NEAR(std::abs(s.inner(moved)), 1.0, 1e-12);
    for (int b = 0; b < n * n; ++b) {
      const Complex ip = s.inner(bell_state(n, b / n, b % n));
      EXPECT_NEAR(std::abs(ip), a == b ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(OrderFinding, ContinuedFractions) {
  EXPECT_EQ(classical_order(2, 15), 4);
  EXPECT_EQ(classical_order(11, 15), 2);
  const auto k = convergent_denominators(12, 16);  // 3/4
  EXPECT_NE(std::find(k.begin(), k.end(), 4), k.end());
}

class OrderFindingBase : public ::testing::TestWithParam<int> {};

TEST_P(OrderFindingBase, MatchesBruteForce) {
  const int a = GetParam();
  const OrderFindingResult r = order_finding_demo(16, 15, a);
  const int order = classical_order(a, 15);
  EXPECT_EQ(r.period, order);
  EXPECT_NEAR(r.joint.sum(), 1.0, 1e-12);
  for (int y = 0; y < 16; ++y) {
    const bool peak = y % (16 / order) == 0;
    EXPECT_EQ(r.marginal[y] > 1e-12, peak) << "y=" << y;
  }
  if (order == 4) EXPECT_EQ(std::set<int>(r.factors.begin(), r.factors.end()), (std::set<int>{3, 5}));
}

INSTANTIATE_TEST_SUITE_P(Bases, OrderFindingBase, ::testing::Values(2, 7, 11, 13));

}  // namespace
}  // namespace spatialq
