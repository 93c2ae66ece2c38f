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

#include <functional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spatialq/modes.hpp"
#include "spatialq/types.hpp"

namespace spatialq {

enum class Side { Splitter, Combiner };

enum class Decomposition {
  /// |A| = |B| = sqrt|T|, phase of T on A.
  Symmetric,
  /// Symmetric split followed by row/column rescaling that equalizes the
  /// power carried by each splitter column and combiner row.
  Balanced,
};

enum class Weighting {
  /// Plain Riemann sum over the circular aperture.
  Uniform,
  /// Weighted by the incident Gaussian intensity exp(-2 r^2 / w0^2).
  Mode,
};

enum class CoefficientModel { Complex, Real };

enum class GradientMethod { Adjoint, FiniteDifference };

/// Factors with a∘b equal to t.
struct HadamardFactors {
  ComplexMatrix a;
  ComplexMatrix b;
};

HadamardFactors hadamard_decompose(const ComplexMatrix& t,
                                   Decomposition strategy = Decomposition::Symmetric);

struct GratingDesign {
  ComplexMatrix a;
  ComplexMatrix b;
  /// Splitter coefficients, one per element of a.
  ComplexMatrix mu;
  /// Combiner coefficients, one per element of b.
  ComplexMatrix nu;
  ModeLayout layout;

  /// Decomposes t and sets every coefficient to 1.
  static GratingDesign from_target(const ComplexMatrix& t, const ModeLayout& layout,
                                   Decomposition strategy = Decomposition::Symmetric);

  int size() const { return static_cast<int>(a.rows()); }
  ComplexMatrix target() const { return a.cwiseProduct(b); }
  /// k_mn = k (R_n - R_m) / 2f
  Vec2 wave_vector(int m, int n) const;
  /// Column n of a (splitter) or row m of b (combiner).
  ComplexVector factor(Side side, int index) const;
  ComplexVector coefficients(Side side, int index) const;
  void set_coefficients(Side side, int index, const ComplexVector& z);
};

struct SynthesisReport {
  double fidelity_a = 0.0;
  double fidelity_b = 0.0;
  double fidelity_t = 0.0;
  double efficiency_a = 0.0;
  double efficiency_b = 0.0;
  double efficiency_t = 0.0;
  int iterations = 0;
  bool converged = false;
};

nlohmann::json report_to_json(const SynthesisReport& r);

/// Sample offsets r - R inside one aperture, with quadrature weights that
/// sum to 1.
struct ApertureSamples {
  std::vector<Vec2> offsets;
  RealVector weights;
};

ApertureSamples sample_aperture(const ModeLayout& layout, double pitch,
                                Weighting weighting = Weighting::Uniform);

/// Grid pixels strictly inside a disk, with their offsets from the centre.
struct GridAperture {
  std::vector<std::size_t> pixels;
  ApertureSamples samples;
};

/// Throws when the disk is not fully inside the grid. w0 is only used by
/// Mode weighting.
GridAperture grid_aperture(const GridSpec& grid, Vec2 centre, double radius,
                           Weighting weighting, double w0);

/// Plane-wave basis of one grating: row j is exp(i s k_j . offset) where
/// s = +1 for a splitter and -1 for a combiner.
class GratingBasis {
 public:
  GratingBasis(const GratingDesign& design, Side side, int index,
               const ApertureSamples& samples);
  /// Row j is exp(i waves[j] . offset).
  GratingBasis(const std::vector<Vec2>& waves, const ApertureSamples& samples);

  int terms() const { return static_cast<int>(waves_.rows()); }
  int samples() const { return static_cast<int>(waves_.cols()); }

  /// exp(i arg sum_j z_j f_j w_j) at every sample.
  ComplexVector phase_only(const ComplexVector& z, const ComplexVector& f) const;
  /// Weighted projections of a sampled grating onto each plane wave.
  ComplexVector coefficients(const ComplexVector& h) const;
  /// Fidelity of the clipped grating's coefficients to f, and its gradient
  /// with respect to z (d/dRe z + i d/dIm z).
  double fidelity(const ComplexVector& z, const ComplexVector& f,
                  ComplexVector* grad = nullptr,
                  ComplexVector* coeffs = nullptr) const;

 private:
  ComplexMatrix waves_;
  RealVector weights_;
};

struct OptimizeOptions {
  CoefficientModel model = CoefficientModel::Complex;
  GradientMethod gradient = GradientMethod::Adjoint;
  /// Fixed-point iterations that seed the descent; 0 disables.
  int warm_start_iterations = 200;
  double warm_start_relaxation = 1.0;
  double step = 1.0;
  int max_iterations = 500;
  /// Stop once an accepted step improves the objective by less than this.
  double tolerance = 1e-8;
  /// Stop once 1 - fidelity drops below this.
  double target_infidelity = 1e-9;
  /// Relative step for central differences.
  double fd_step = 1e-3;
};

struct CoefficientFit {
  ComplexVector z;
  ComplexVector coefficients;
  double initial_fidelity = 0.0;
  double initial_efficiency = 0.0;
  double fidelity = 0.0;
  double efficiency = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective 1 - fidelity after every accepted step, starting point first.
  std::vector<double> history;
};

/// Maximizes the fidelity of one phase-only grating to the factor slice f,
/// starting from z0. Zero entries of f keep their coefficient at 0.
CoefficientFit fit_grating(const GratingBasis& basis, const ComplexVector& f,
                           const ComplexVector& z0, const OptimizeOptions& opts = {});

double matrix_fidelity(const ComplexMatrix& x_exp, const ComplexMatrix& x);
double matrix_efficiency(const ComplexMatrix& x_exp, const ComplexMatrix& x);

/// Column-normalized a (splitter) or row-normalized b (combiner): the best a
/// unimodular grating can do.
ComplexMatrix normalized_factor(const GratingDesign& design, Side side);

struct SideResult {
  ComplexMatrix coefficients;
  /// Extracted matrix implemented by the current gratings.
  ComplexMatrix implemented;
  double fidelity = 0.0;
  double efficiency = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Extracted factor for the design's current coefficients.
SideResult evaluate_side(const GratingDesign& design, Side side,
                         const ApertureSamples& samples);

/// Optimizes every grating on one side independently.
SideResult optimize_coefficients(const GratingDesign& design, Side side,
                                 const ApertureSamples& samples,
                                 const OptimizeOptions& opts = {});

SynthesisReport evaluate(const GratingDesign& design, const ApertureSamples& samples);

struct SynthesisOptions {
  Decomposition decomposition = Decomposition::Symmetric;
  Weighting weighting = Weighting::Uniform;
  double pitch = 8e-6;
  bool optimize = true;
  OptimizeOptions optimizer{};
};

/// Decomposes t, optimizes both sides and reports the implemented quality.
std::pair<GratingDesign, SynthesisReport> synthesize(const ComplexMatrix& t,
                                                     const ModeLayout& layout,
                                                     const SynthesisOptions& opts = {});

// Gratings sampled on a full grid. Values outside the aperture are zero.

SampledField ideal_splitting_grating(const GratingDesign& design, int n,
                                     const GridSpec& grid);

SampledField phase_only_grating(const GratingDesign& design, Side side, int index,
                                const GridSpec& grid);

/// One grating per column (splitter) or row (combiner), indexed like the
/// factor it implements.
ComplexMatrix extract_matrix(const std::vector<SampledField>& gratings,
                             const GratingDesign& design, Side side,
                             Weighting weighting = Weighting::Uniform);

}  // namespace spatialq
