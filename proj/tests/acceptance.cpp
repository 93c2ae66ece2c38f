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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails that is not listed as a known
// deviation below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spatialq/calib.hpp"
#include "spatialq/linalg.hpp"
#include "spatialq/optsim.hpp"
#include "spatialq/qops.hpp"
#include "spatialq/synthesis.hpp"
#include "spatialq/tomo.hpp"

using namespace spatialq;

namespace {

// Failures here are reproducible properties of the model, recorded in the
// README. They still print FAIL.
const std::set<int> kKnownDeviations = {1, 6};

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(s.sd / (v.size() - 1)) : 0.0;
  return s;
}

GratingDesign design_for(const ComplexMatrix& t, const SetupConfig& c) {
  return optimize_for_setup(GratingDesign::from_target(t, c.layout, Decomposition::Balanced), c);
}

Outcome splitting_synthesis() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> mu1_by_n;
  for (int n : {5, 15, 25}) {
    auto rng = split_rng(101, n);
    const ModeLayout layout = desk_circle_layout(n);
    const ApertureSamples samples = sample_aperture(layout, 8e-6);
    std::vector<double> f0, f1, penalty;
    for (int trial = 0; trial < 20; ++trial) {
      const GratingDesign d = GratingDesign::from_target(random_complex_matrix(n, n, rng), layout);
      const SideResult base = evaluate_side(d, Side::Splitter, samples);
      const SideResult opt = optimize_coefficients(d, Side::Splitter, samples);
      f0.push_back(base.fidelity);
      f1.push_back(opt.fidelity);
      penalty.push_back(1.0 - opt.efficiency / base.efficiency);
    }
    const double worst = *std::min_element(f1.begin(), f1.end());
    const double pen = stats(penalty).mean;
    mu1_by_n.push_back(stats(f0).mean);
    o.check(worst >= 0.999, "N=" + std::to_string(n) + " min F " + fmt("%.6f", worst));
    o.check(pen < 0.02, "penalty " + fmt("%.4f", pen) + " (max " +
                            fmt("%.4f", *std::max_element(penalty.begin(), penalty.end())) + ")");
  }
  const bool trend = mu1_by_n[0] > mu1_by_n[1] && mu1_by_n[1] > mu1_by_n[2];
  o.check(trend, "mu=1 F by N " + fmt("%.5f", mu1_by_n[0]) + "/" + fmt("%.5f", mu1_by_n[1]) + "/" +
                     fmt("%.5f", mu1_by_n[2]) + " decreasing");
  const double dt = seconds_since(t0);
  o.check(dt < 600, "time " + fmt("%.0f", dt) + " s");
  return o;
}

Outcome transfer_matrices() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SetupConfig c = desk_setup(15);
  const OpticalTrain train(c);
  auto rng = split_rng(202, 0);
  std::vector<double> f;
  for (int i = 0; i < 100; ++i) {
    const ComplexMatrix u = random_unitary(15, rng);
    f.push_back(matrix_fidelity(train.transfer_matrix(design_for(u, c)), u));
  }
  const Stats s = stats(f);
  o.check(s.mean >= 0.999, "mean F " + fmt("%.6f", s.mean));
  o.check(s.sd < 1e-3, "sd " + fmt("%.2e", s.sd));
  const double dt = seconds_since(t0);
  o.check(dt < 1800, "time " + fmt("%.0f", dt) + " s");
  return o;
}

double amplitude_fidelity(const RealMatrix& c) {
  return std::pow(c.diagonal().cwiseSqrt().sum(), 2) / (c.rows() * c.sum());
}

Outcome qft_fourier_basis() {
  Outcome o;
  const int n = 15;
  const SetupConfig c = desk_setup(n);
  const ComplexMatrix x = OpticalTrain(c).transfer_matrix(design_for(qft_matrix(n), c)) * fourier_basis(n);
  const double f0 = matrix_fidelity(x, ComplexMatrix::Identity(n, n));
  o.check(f0 > 0.995, "noiseless F " + fmt("%.6f", f0));
  RealMatrix p = x.cwiseAbs2();
  for (Eigen::Index k = 0; k < n; ++k) p.col(k) /= p.col(k).sum();
  NoiseModel noise;
  noise.duration = 120.0;
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    noise.seed = seed;
    const double f = amplitude_fidelity(simulate_port_counts(p, noise, n));
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  o.check(lo >= 0.80 && hi <= 0.92, "noisy F over 10 seeds in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]");
  return o;
}

Outcome sic_construction() {
  Outcome o;
  double worst = 0.0, completeness = 0.0;
  for (int d = 2; d <= 8; ++d) {
    const ComplexVector psi = find_sic_fiducial(d);
    worst = std::max(worst, sic_deviation(psi));
    completeness = std::max(completeness, sic_povm(d, psi).completeness_residual());
  }
  o.check(worst < 1e-6, "d=2..8 max deviation " + fmt("%.1e", worst));
  const auto t0 = std::chrono::steady_clock::now();
  const ComplexVector psi15 = load_or_find_sic_fiducial(15, SPATIALQ_DATA_DIR);
  const double load = seconds_since(t0);
  const double dev15 = sic_deviation(psi15);
  completeness = std::max(completeness, sic_povm(15, psi15).completeness_residual());
  o.check(dev15 < 1e-5, "d=15 deviation " + fmt("%.1e", dev15));
  o.check(completeness < 1e-10, "completeness " + fmt("%.1e", completeness));
  o.check(load < 1.0, "d=15 cache load " + fmt("%.3f", load) + " s");
  return o;
}

DensityMatrix reconstruct_subset(const ProjectorList& all, const RealVector& p, int m,
                                 std::mt19937_64& rng) {
  std::vector<int> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  ProjectorList sub;
  RealVector q(m);
  for (int i = 0; i < m; ++i) {
    sub.push_back(all[idx[i]]);
    q[i] = p[idx[i]];
  }
  return cs_reconstruct(sub, q);
}

Outcome tomography(const PovmSet& povm) {
  Outcome o;
  const int d = 15;
  auto rng = split_rng(505, 0);
  double worst = 1.0;
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = DensityMatrix::pure(random_state(d, rng));
    const RealVector p = projection_probabilities(rho, povm.states);
    worst = std::min(worst, dm_fidelity(reconstruct_subset(povm.states, p, 100, rng), rho));
  }
  o.check(worst > 0.99, "noiseless min F " + fmt("%.5f", worst));
  StateVector phi4 = StateVector::Zero(d);
  phi4[3] = 1.0;
  const std::vector<std::pair<std::string, StateVector>> states = {
      {"phi4", phi4}, {"omega2", fourier_basis(d).col(2)}};
  for (const auto& [name, psi] : states) {
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const RealVector q = projection_probabilities(rho, povm.states);
    std::vector<double> fid, fs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      NoiseModel noise;
      noise.seed = seed;
      const RealVector p = estimate_probabilities(simulate_counts(rho, povm.states, noise));
      fs.push_back(statistical_fidelity(p, q));
      auto sub_rng = split_rng(seed, 77);
      fid.push_back(dm_fidelity(reconstruct_subset(povm.states, p, 100, sub_rng), rho));
    }
    const double f = stats(fid).mean, s = stats(fs).mean;
    o.check(f >= 0.78 && f <= 0.92, name + " mean F " + fmt("%.3f", f));
    o.check(s >= 0.94 && s <= 0.99, name + " F_s " + fmt("%.3f", s));
  }
  return o;
}

Outcome sampling_sweep_trend(const PovmSet& povm) {
  Outcome o;
  StateVector phi4 = StateVector::Zero(15);
  phi4[3] = 1.0;
  SweepOptions so;
  so.ratios = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  so.trials = 10;
  so.seed = 606;
  const SweepResult r = sampling_sweep(phi4, povm.states, so);
  std::vector<double> ratio, fid;
  double margin = 1.0;
  for (const auto& row : r.rows) {
    ratio.push_back(row.ratio);
    fid.push_back(row.fidelity_mean);
    margin = std::min(margin, std::sqrt(1.0 - row.fidelity_mean) + 0.02 - row.trace_distance_mean);
  }
  const double rho = spearman(ratio, fid);
  const double slope = error_slope(r.rows);
  o.check(rho > 0.8, "Spearman " + fmt("%.3f", rho));
  o.check(margin >= 0.0, "trace-distance bound margin " + fmt("%.3f", margin));
  o.check(slope >= -0.7 && slope <= -0.3, "log-log slope " + fmt("%.3f", slope));
  return o;
}

Outcome calibration_closure() {
  Outcome o;
  const int n = 15;
  const ComplexMatrix f = qft_matrix(n);
  auto rng = split_rng(707, 0);
  std::vector<PhaseErrorMap> maps;
  double worst = 1.0;
  for (int i = 0; i < 10; ++i) {
    maps.push_back(PhaseErrorMap::random(n, kPi, rng));
    const ComplexMatrix measured = apply_phase_error(f, maps.back());
    const RealMatrix mags = estimate_magnitudes(basis_intensities(measured));
    const PhaseErrorMap got = phase_error_from(f, recover_phases(probe_intensities(measured), mags));
    worst = std::min(worst, row_phase_fidelity(apply_phase_error(compensate(f, got), maps.back()), f));
  }
  o.check(worst > 0.9999, "noiseless min F " + fmt("%.7f", worst));
  double worst_port = 1.0;
  const ComplexMatrix om = fourier_basis(n);
  for (const PhaseErrorMap& eps : maps) {
    SetupConfig c = desk_setup(n);
    c.phase_error = eps.eps;
    const OpticalTrain train(c);
    const ComplexMatrix t_raw = train.transfer_matrix(design_for(f, c));
    const RealMatrix mags = estimate_magnitudes(basis_intensities(t_raw));
    const PhaseErrorMap got = phase_error_from(f, recover_phases(probe_intensities(t_raw), mags));
    const GratingDesign fixed = design_for(compensate(f, got), c);
    for (int k = 0; k < n; ++k) {
      const StateVector out = train.run(fixed, optimize_prep(om.col(k), c));
      worst_port = std::min(worst_port, std::norm(out[k]) / out.squaredNorm());
    }
  }
  o.check(worst_port > 0.9, "optsim min port fraction " + fmt("%.4f", worst_port));
  return o;
}

Outcome order_finding() {
  Outcome o;
  for (int a : {2, 7, 11, 13}) {
    const OrderFindingResult r = order_finding_demo(16, 15, a);
    const int order = classical_order(a, 15);
    bool peaks = true;
    for (int y = 0; y < 16; ++y) peaks = peaks && ((r.marginal[y] > 1e-12) == (y % (16 / order) == 0));
    std::set<int> factors(r.factors.begin(), r.factors.end());
    const bool ok = r.period == order && peaks &&
                    (order != 4 || factors == std::set<int>{3, 5}) && (a != 11 || r.period == 2);
    o.check(ok, "a=" + std::to_string(a) + " r=" + std::to_string(r.period));
  }
  return o;
}

Outcome bell_basis() {
  Outcome o;
  const int n = 15;
  ComplexMatrix v(n * n, n * n);
  const BipartiteState root = bell_state(n, 0, 0);
  double reach = 0.0;
  for (int a = 0; a < n * n; ++a) {
    const BipartiteState s = bell_state(n, a / n, a % n);
    v.col(a) = s.vector();
    const BipartiteState moved = apply_local(ComplexMatrix::Identity(n, n),
                                             shift_matrix(n, a / n) * clock_matrix(n, a % n), root);
    reach = std::max(reach, std::abs(std::abs(s.inner(moved)) - 1.0));
  }
  const double ortho = (v.adjoint() * v - ComplexMatrix::Identity(n * n, n * n)).cwiseAbs().maxCoeff();
  o.check(ortho < 1e-10, "Gram deviation " + fmt("%.1e", ortho));
  o.check(reach < 1e-10, "reachability deviation " + fmt("%.1e", reach));
  return o;
}

Outcome loss_budget_check() {
  Outcome o;
  const LossBudget b = loss_budget(15, reported_component_losses());
  const double intrinsic = b.items.front().db;
  o.check(std::round(intrinsic * 100) / 100 == 11.76, "intrinsic " + fmt("%.4f", intrinsic) + " dB");
  o.check(std::abs(b.total_db() - 32.0) <= 1.0, "total " + fmt("%.2f", b.total_db()) + " dB");
  return o;
}

}  // namespace

int main() {
  const PovmSet povm = sic_povm(15, load_or_find_sic_fiducial(15, SPATIALQ_DATA_DIR));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"splitting synthesis", splitting_synthesis},
      {"noiseless transfer matrices", transfer_matrices},
      {"QFT on the Fourier basis", qft_fourier_basis},
      {"SIC construction", sic_construction},
      {"tomography", [&] { return tomography(povm); }},
      {"sampling sweep", [&] { return sampling_sweep_trend(povm); }},
      {"calibration closure", calibration_closure},
      {"order finding", order_finding},
      {"Bell basis", bell_basis},
      {"loss budget", loss_budget_check},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const bool known = kKnownDeviations.count(id) > 0;
    if (!o.pass && !known) ++unexpected;
    std::printf("%s %2d %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), !o.pass && known ? " (known deviation)" : "");
    std::fflush(stdout);
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
