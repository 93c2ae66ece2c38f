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
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spatialq/types.hpp"

namespace spatialq {

/// DFT with F(m, n) = exp(2 pi i m n / N) / sqrt(N), the inverse of the
/// conjugate Fourier basis so that F * fourier_basis(N) = I.
ComplexMatrix qft_matrix(int n);

/// Columns omega_n with omega_n(j) = exp(-2 pi i j n / N) / sqrt(N).
ComplexMatrix fourier_basis(int n);

/// |x> -> |x + m mod N>.
ComplexMatrix shift_matrix(int n, int m);

/// |x> -> exp(2 pi i x k / N) |x>.
ComplexMatrix clock_matrix(int n, int k);

/// Two-qudit state sum_xy amps(x, y) |x>|y>.
struct BipartiteState {
  ComplexMatrix amps;

  int dim() const { return static_cast<int>(amps.rows()); }
  /// Flattened with index x * d + y.
  ComplexVector vector() const;
  Complex inner(const BipartiteState& other) const;
};

/// (1/sqrt N) sum_x exp(2 pi i x k / N) |x>|x + m mod N>.
BipartiteState bell_state(int n, int m, int k);

/// (A (x) B) |psi>.
BipartiteState apply_local(const ComplexMatrix& a, const ComplexMatrix& b,
                           const BipartiteState& psi);

/// tau^(m n) X^m Z^n with tau = -exp(i pi / d).
ComplexMatrix displacement_operator(int d, int m, int n);

struct SicSearchOptions {
  int restarts = 200;
  int max_iterations = 2000;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
};

/// max over (m, n) != (0, 0) of | |<psi|D_mn|psi>|^2 - 1/(d + 1) |, for
/// normalized psi.
double sic_deviation(const ComplexVector& fiducial);

/// Random-restart quasi-Newton search on the frame potential
/// sum |<psi|D|psi>|^4 / |psi|^8, whose global minima are the SIC fiducials.
/// Throws ConvergenceError with the best deviation if the budget runs out.
ComplexVector find_sic_fiducial(int d, const SicSearchOptions& opts = {});

/// Look for a cached fiducial in `cache_dir`, search and store one otherwise.
ComplexVector load_or_find_sic_fiducial(int d, const std::string& cache_dir,
                                        const SicSearchOptions& opts = {});

nlohmann::json complex_vector_to_json(const ComplexVector& v);
ComplexVector complex_vector_from_json(const nlohmann::json& j);

/// Rank-1 elements D|psi><psi|D^dagger / d, indexed m * d + n.
struct PovmSet {
  int d = 0;
  ComplexVector fiducial;
  /// The displaced fiducials D_mn |psi>, unit norm.
  std::vector<ComplexVector> states;

  std::size_t size() const { return states.size(); }
  ComplexMatrix element(std::size_t i) const;
  /// Tr(Pi_i rho).
  double probability(std::size_t i, const ComplexMatrix& rho) const;
  RealVector probabilities(const ComplexMatrix& rho) const;
  /// max |sum_i Pi_i - I|.
  double completeness_residual() const;
};

PovmSet sic_povm(int d, const ComplexVector& fiducial, double tolerance = 1e-5);

struct OrderFindingResult {
  int register_size = 0;
  int modulus = 0;
  int base = 0;
  /// p(y, f) over register-1 outcome y (rows) and register-2 value f (cols).
  RealMatrix joint;
  RealVector marginal;
  int period = 0;
  std::vector<int> factors;
};

/// Period of a^x mod M by exhaustion.
int classical_order(int a, int modulus);

/// Compiled order finding: QFT on register 1 after the modular exponential
/// relabels register 2; the period is read off the continued fractions of
/// the likely outcomes y / N.
OrderFindingResult order_finding_demo(int register_size, int modulus, int a);

/// Convergent denominators of y / n.
std::vector<int> convergent_denominators(int y, int n);

}  // namespace spatialq
