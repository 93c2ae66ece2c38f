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
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "spatialq/types.hpp"

namespace spatialq {

struct DensityMatrix {
  ComplexMatrix mat;

  int dim() const { return static_cast<int>(mat.rows()); }
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int d);
  double purity() const;
  /// Throws InvalidArgument unless Hermitian, unit trace and PSD within
  /// the given tolerances.
  void validate(double herm_tol = 1e-10, double eig_tol = 1e-8, double trace_tol = 1e-8) const;
};

nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);

struct CountRecord {
  int projector_id = 0;
  /// Integral for Poisson draws; the exact mean in analytic mode.
  double counts = 0.0;
  double duration = 0.0;
  double source_rate = 0.0;
  double dark_rate = 0.0;
};

struct NoiseModel {
  /// Heralded pair rate at the source (Hz).
  double raw_rate = 270.0;
  /// Total insertion loss of the setup.
  double loss_db = 32.0;
  /// Accidental coincidences per minute, per measured port.
  double dark_per_minute = 2.0;
  double duration = 60.0;
  std::uint64_t seed = 1;
  /// The pinhole's 10 log10 N filtering loss applies to an average over
  /// ports; a projector that collects a single port does not pay it.
  bool exclude_intrinsic_loss = true;
  /// Expected counts without shot noise or dark counts.
  bool analytic = false;

  static NoiseModel noiseless();
  /// Detected rate per unit projection probability for dimension n.
  double effective_rate(int n) const;
  double dark_rate() const { return dark_per_minute / 60.0; }
  void validate() const;
};

/// Unit vectors |s_i> whose projections |<s_i|psi>|^2 are recorded.
using ProjectorList = std::vector<ComplexVector>;

/// |<s_i|rho|s_i>| per projector.
RealVector projection_probabilities(const DensityMatrix& rho, const ProjectorList& projectors);

/// counts_i ~ Poisson(q_i R_eff t + dark t), drawn from stream `stream` of
/// the model's seed.
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const ProjectorList& projectors,
                                         const NoiseModel& noise, std::uint64_t stream = 0);

/// Counts for each entry of a table of port probabilities (same noise model).
RealMatrix simulate_port_counts(const RealMatrix& probabilities, const NoiseModel& noise, int n,
                                std::uint64_t stream = 0);

/// max(counts - dark t, 0), or the raw counts when subtract_dark is false.
RealVector estimate_probabilities(const std::vector<CountRecord>& records, bool subtract_dark = true);

/// sum_i sqrt(p_i q_i) after normalizing both.
double statistical_fidelity(const RealVector& p_exp, const RealVector& p);

struct ReconstructOptions {
  int max_iterations = 20000;
  /// Stop once an iteration moves rho by less than this (Frobenius).
  double tolerance = 1e-9;
  /// Fit the data up to an overall scale (probabilities normalized over the
  /// measured subset). When false the data are taken as Tr(Pi_i rho) with
  /// Pi_i = |s_i><s_i| / d.
  bool fit_scale = true;
};

/// Least squares over the density matrices by accelerated projected
/// gradient; each step projects the spectrum onto the probability simplex.
DensityMatrix cs_reconstruct(const ProjectorList& projectors, const RealVector& data,
                             const ReconstructOptions& opts = {});

/// Euclidean projection of a Hermitian matrix onto unit-trace PSD matrices.
ComplexMatrix project_to_density(const ComplexMatrix& m);

/// |Tr sqrt(sqrt(rho) rho_exp sqrt(rho))|^2; <psi|rho_exp|psi> when rho is pure.
double dm_fidelity(const DensityMatrix& rho_exp, const DensityMatrix& rho);

/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& rho_exp, const DensityMatrix& rho);

struct SweepOptions {
  std::vector<double> ratios;
  int trials = 5;
  std::uint64_t seed = 1;
  NoiseModel noise;
  ReconstructOptions reconstruct;
};

struct SweepRow {
  double ratio = 0.0;
  int m = 0;
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;
  double trace_distance_mean = 0.0;
  double trace_distance_std = 0.0;
  /// Frobenius distance to the true state.
  double dm_error_mean = 0.0;
  /// RMS deviation of the normalized measured probabilities on the subset.
  double projection_error_mean = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

SweepResult sampling_sweep(const StateVector& state, const ProjectorList& povm,
                           const SweepOptions& opts);

/// Spearman rank correlation.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares slope of log(dm_error) against log(m).
double error_slope(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_counts_csv(std::ostream& os, const std::vector<CountRecord>& records);

struct LossItem {
  std::string name;
  double db = 0.0;
};

struct LossBudget {
  std::vector<LossItem> items;
  double total_db() const;
};

/// 10 log10 N intrinsic term followed by the component losses.
LossBudget loss_budget(int n, const std::vector<LossItem>& components = {});

/// The component losses reported for the laboratory setup.
std::vector<LossItem> reported_component_losses();

}  // namespace spatialq
