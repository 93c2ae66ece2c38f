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


#include "spatialq/tomo.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "spatialq/linalg.hpp"

namespace spatialq {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Euclidean projection of v onto {x >= 0, sum x = 1}.
RealVector simplex_projection(const RealVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    css += u[k];
    const double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw InvalidArgument("DensityMatrix::pure: zero vector");
  const StateVector u = psi / n;
  return {u * u.adjoint()};
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  if (d < 1) throw InvalidArgument("DensityMatrix: dimension must be positive");
  return {ComplexMatrix::Identity(d, d) / static_cast<double>(d)};
}

double DensityMatrix::purity() const { return (mat * mat).trace().real(); }

void DensityMatrix::validate(double herm_tol, double eig_tol, double trace_tol) const {
  if (mat.rows() != mat.cols() || mat.rows() == 0) {
    throw InvalidArgument("density matrix must be square and non-empty");
  }
  if (!is_hermitian(mat, herm_tol)) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(mat.trace() - Complex(1.0, 0.0)) > trace_tol) {
    throw InvalidArgument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(mat), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -eig_tol) {
    throw InvalidArgument("density matrix has a negative eigenvalue");
  }
}

nlohmann::json density_to_json(const DensityMatrix& rho) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rho.mat.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array(), s = nlohmann::json::array();
    for (Eigen::Index j = 0; j < rho.mat.cols(); ++j) {
      r.push_back(rho.mat(i, j).real());
      s.push_back(rho.mat(i, j).imag());
    }
    re.push_back(r);
    im.push_back(s);
  }
  return {{"d", rho.dim()}, {"re", re}, {"im", im}};
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  DensityMatrix rho{ComplexMatrix(d, d)};
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      rho.mat(i, k) = Complex(j.at("re").at(i).at(k).get<double>(), j.at("im").at(i).at(k).get<double>());
    }
  }
  return rho;
}

NoiseModel NoiseModel::noiseless() {
  NoiseModel m;
  m.analytic = true;
  m.dark_per_minute = 0.0;
  return m;
}

double NoiseModel::effective_rate(int n) const {
  const double intrinsic = exclude_intrinsic_loss && n > 1 ? 10.0 * std::log10(n) : 0.0;
  return raw_rate * std::pow(10.0, -(loss_db - intrinsic) / 10.0);
}

void NoiseModel::validate() const {
  if (raw_rate < 0.0 || dark_per_minute < 0.0 || !(duration > 0.0)) {
    throw InvalidArgument("noise model: rates must be >= 0 and duration > 0");
  }
}

RealVector projection_probabilities(const DensityMatrix& rho, const ProjectorList& projectors) {
  RealVector q(static_cast<Eigen::Index>(projectors.size()));
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const ComplexVector& s = projectors[i];
    if (s.size() != rho.dim()) throw InvalidArgument("projector dimension mismatch");
    q[static_cast<Eigen::Index>(i)] = std::max(0.0, s.dot(rho.mat * s).real());
  }
  return q;
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const ProjectorList& projectors,
                                         const NoiseModel& noise, std::uint64_t stream) {
  noise.validate();
  const RealVector q = projection_probabilities(rho, projectors);
  const double rate = noise.effective_rate(rho.dim());
  const double dark = noise.analytic ? 0.0 : noise.dark_rate();
  auto rng = split_rng(noise.seed, stream);
  std::vector<CountRecord> out;
  out.reserve(projectors.size());
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const double mu = q[static_cast<Eigen::Index>(i)] * rate * noise.duration + dark * noise.duration;
    double c = mu;
    if (!noise.analytic) {
      std::poisson_distribution<long long> pd(mu);
      c = mu > 0.0 ? static_cast<double>(pd(rng)) : 0.0;
    }
    out.push_back({static_cast<int>(i), c, noise.duration, rate, dark});
  }
  return out;
}

RealMatrix simulate_port_counts(const RealMatrix& probabilities, const NoiseModel& noise, int n,
                                std::uint64_t stream) {
  noise.validate();
  const double rate = noise.effective_rate(n);
  const double dark = noise.analytic ? 0.0 : noise.dark_rate();
  auto rng = split_rng(noise.seed, stream);
  RealMatrix c(probabilities.rows(), probabilities.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      const double mu = probabilities(i, j) * rate * noise.duration + dark * noise.duration;
      if (noise.analytic || mu <= 0.0) {
        c(i, j) = std::max(mu, 0.0);
      } else {
        std::poisson_distribution<long long> pd(mu);
        c(i, j) = static_cast<double>(pd(rng));
      }
    }
  }
  return c;
}

RealVector estimate_probabilities(const std::vector<CountRecord>& records, bool subtract_dark) {
  RealVector p(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.counts < 0.0) throw InvalidArgument("negative count");
    p[static_cast<Eigen::Index>(i)] =
        subtract_dark ? std::max(r.counts - r.dark_rate * r.duration, 0.0) : r.counts;
  }
  return p;
}

double statistical_fidelity(const RealVector& p_exp, const RealVector& p) {
  if (p_exp.size() != p.size()) throw InvalidArgument("statistical_fidelity: length mismatch");
  if (p_exp.minCoeff() < 0.0 || p.minCoeff() < 0.0) {
    throw InvalidArgument("statistical_fidelity: negative entry");
  }
  const double a = p_exp.sum(), b = p.sum();
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("statistical_fidelity: zero-sum distribution");
  const double f = (p_exp.array() * p.array()).sqrt().sum() / std::sqrt(a * b);
  return std::min(1.0, f);
}

ComplexMatrix project_to_density(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  const RealVector w = simplex_projection(es.eigenvalues());
  const ComplexMatrix& u = es.eigenvectors();
  return u * w.cast<Complex>().asDiagonal() * u.adjoint();
}

DensityMatrix cs_reconstruct(const ProjectorList& projectors, const RealVector& data,
                             const ReconstructOptions& opts) {
  const auto m = static_cast<Eigen::Index>(projectors.size());
  if (m == 0 || data.size() != m) throw InvalidArgument("cs_reconstruct: data/projector mismatch");
  const auto d = projectors.front().size();
  if (m < d) throw InvalidArgument("cs_reconstruct: need at least d measurements");
  if (data.minCoeff() < 0.0) throw InvalidArgument("cs_reconstruct: negative data");
  ComplexMatrix s(d, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (projectors[static_cast<std::size_t>(i)].size() != d) {
      throw InvalidArgument("cs_reconstruct: projector dimension mismatch");
    }
    s.col(i) = projectors[static_cast<std::size_t>(i)];
  }
  RealVector p = data;
  double unit = 1.0;
  if (opts.fit_scale) {
    if (!(p.sum() > 0.0)) throw InvalidArgument("cs_reconstruct: all data are zero");
    p /= p.sum();
  } else {
    // Pi_i = |s_i><s_i| / d.
    unit = 1.0 / static_cast<double>(d);
  }

  // Linear model A(rho)_i = unit <s_i|rho|s_i> - p_i sum_j unit <s_j|rho|s_j>
  // (second term only when fitting the scale), as a real matrix on vec(rho).
  const Eigen::Index dd = d * d;
  ComplexMatrix a(m, dd);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) a(i, c * d + r) = unit * std::conj(s(r, i)) * s(c, i);
    }
  }
  if (opts.fit_scale) {
    const Eigen::RowVectorX<Complex> total = a.colwise().sum();
    a -= p.cast<Complex>() * total;
  }
  const RealVector target = opts.fit_scale ? RealVector::Zero(m) : p;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> gram(a.adjoint() * a, Eigen::EigenvaluesOnly);
  const double lipschitz = gram.eigenvalues().maxCoeff();
  if (!(lipschitz > 0.0)) throw InvalidArgument("cs_reconstruct: degenerate measurement set");
  const double step = 1.0 / lipschitz;

  auto gradient = [&](const ComplexMatrix& rho) {
    const Eigen::Map<const ComplexVector> v(rho.data(), dd);
    const RealVector r = (a * v).real() - target;
    ComplexVector g = a.adjoint() * r.cast<Complex>();
    return ComplexMatrix(Eigen::Map<ComplexMatrix>(g.data(), d, d));
  };

  ComplexMatrix rho = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  ComplexMatrix y = rho;
  double t = 1.0;
  double moved = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const ComplexMatrix next = project_to_density(y - step * hermitian_part(gradient(y)));
    moved = (next - rho).norm();
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // Restart the momentum whenever it points uphill.
    if ((y - next).cwiseProduct((next - rho).conjugate()).sum().real() > 0.0) {
      y = next;
      t = 1.0;
    } else {
      y = next + ((t - 1.0) / t_next) * (next - rho);
      t = t_next;
    }
    rho = next;
    if (moved < opts.tolerance) {
      DensityMatrix out{hermitian_part(rho)};
      return out;
    }
  }
  throw ConvergenceError("cs_reconstruct: projected gradient did not converge", moved);
}

double dm_fidelity(const DensityMatrix& rho_exp, const DensityMatrix& rho) {
  if (rho_exp.dim() != rho.dim()) throw InvalidArgument("dm_fidelity: dimension mismatch");
  rho_exp.validate(1e-8, 1e-8, 1e-6);
  rho.validate(1e-8, 1e-8, 1e-6);
  if (rho.purity() > 1.0 - 1e-8) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho.mat));
    const ComplexVector psi = es.eigenvectors().col(rho.dim() - 1);
    return std::clamp(psi.dot(rho_exp.mat * psi).real(), 0.0, 1.0);
  }
  const ComplexMatrix sr = psd_sqrt(hermitian_part(rho.mat));
  const ComplexMatrix inner = psd_sqrt(hermitian_part(sr * rho_exp.mat * sr));
  return std::clamp(std::norm(inner.trace()), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho_exp, const DensityMatrix& rho) {
  if (rho_exp.dim() != rho.dim()) throw InvalidArgument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho_exp.mat - rho.mat),
                                                  Eigen::EigenvaluesOnly);
  return std::min(1.0, 0.5 * es.eigenvalues().cwiseAbs().sum());
}

SweepResult sampling_sweep(const StateVector& state, const ProjectorList& povm,
                           const SweepOptions& opts) {
  if (opts.trials < 1) throw InvalidArgument("sampling_sweep: need at least one trial");
  const DensityMatrix truth = DensityMatrix::pure(state);
  const int d = truth.dim();
  const int total = static_cast<int>(povm.size());
  const RealVector q = projection_probabilities(truth, povm);
  SweepResult res;
  for (std::size_t k = 0; k < opts.ratios.size(); ++k) {
    const double ratio = opts.ratios[k];
    if (!(ratio > 0.0) || ratio > 1.0) throw InvalidArgument("sampling_sweep: ratios must be in (0, 1]");
    const int m = static_cast<int>(std::lround(ratio * total));
    if (m < d) {
      res.warnings.push_back("ratio " + std::to_string(ratio) + " gives m = " + std::to_string(m) +
                             " < d; skipped");
      continue;
    }
    std::vector<double> fid, td, err, perr;
    for (int trial = 0; trial < opts.trials; ++trial) {
      const std::uint64_t stream = k * 100003 + static_cast<std::uint64_t>(trial);
      auto rng = split_rng(opts.seed, stream);
      NoiseModel noise = opts.noise;
      noise.seed = rng();
      const auto records = simulate_counts(truth, povm, noise);
      const RealVector p_all = estimate_probabilities(records, !noise.analytic);
      std::vector<int> idx(total);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(m));
      ProjectorList sub;
      RealVector p(m), qs(m);
      for (int i = 0; i < m; ++i) {
        sub.push_back(povm[static_cast<std::size_t>(idx[i])]);
        p[i] = p_all[idx[i]];
        qs[i] = q[idx[i]];
      }
      if (!(p.sum() > 0.0)) {
        res.warnings.push_back("ratio " + std::to_string(ratio) + ": trial with no counts skipped");
        continue;
      }
      const DensityMatrix est = cs_reconstruct(sub, p, opts.reconstruct);
      fid.push_back(dm_fidelity(est, truth));
      td.push_back(trace_distance(est, truth));
      err.push_back((est.mat - truth.mat).norm());
      perr.push_back((p / p.sum() - qs / qs.sum()).norm() / std::sqrt(static_cast<double>(m)));
    }
    if (fid.empty()) continue;
    res.rows.push_back({ratio, m, mean(fid), stddev(fid), mean(td), stddev(td), mean(err), mean(perr)});
  }
  return res;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman: need two equal-length series");
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double error_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    if (r.dm_error_mean > 0.0) {
      lx.push_back(std::log(static_cast<double>(r.m)));
      ly.push_back(std::log(r.dm_error_mean));
    }
  }
  if (lx.size() < 2) throw InvalidArgument("error_slope: need two points with nonzero error");
  const double mx = mean(lx), my = mean(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "ratio,m,fidelity_mean,fidelity_std,trace_distance_mean,trace_distance_std,"
        "dm_error_mean,projection_error_mean\n";
  for (const auto& r : rows) {
    os << r.ratio << ',' << r.m << ',' << r.fidelity_mean << ',' << r.fidelity_std << ','
       << r.trace_distance_mean << ',' << r.trace_distance_std << ',' << r.dm_error_mean << ','
       << r.projection_error_mean << '\n';
  }
}

void write_counts_csv(std::ostream& os, const std::vector<CountRecord>& records) {
  os << "projector_id,counts,duration_s,source_rate_hz,dark_rate_hz\n";
  for (const auto& r : records) {
    os << r.projector_id << ',' << r.counts << ',' << r.duration << ',' << r.source_rate << ','
       << r.dark_rate << '\n';
  }
}

double LossBudget::total_db() const {
  double s = 0.0;
  for (const auto& i : items) s += i.db;
  return s;
}

LossBudget loss_budget(int n, const std::vector<LossItem>& components) {
  if (n < 1) throw InvalidArgument("loss_budget: N must be positive");
  LossBudget b;
  b.items.push_back({"intrinsic 1/N filtering", 10.0 * std::log10(static_cast<double>(n))});
  b.items.insert(b.items.end(), components.begin(), components.end());
  return b;
}

std::vector<LossItem> reported_component_losses() {
  return {{"SLM1/SLM2 modulation efficiency", 9.52},
          {"polarization control and fiber-to-free-space collimation", 3.01},
          {"state generation (SLM0)", 4.46},
          {"free-space-to-fiber collection", 4.15}};
}

}  // namespace spatialq
