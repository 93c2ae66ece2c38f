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


#include "spatialq/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace spatialq {

namespace {

constexpr double kTiny = 1e-300;

double vec_fidelity(const ComplexVector& c, const ComplexVector& f) {
  const double cc = c.squaredNorm();
  const double ff = f.squaredNorm();
  if (cc <= 0.0 || ff <= 0.0) return 0.0;
  return std::norm(f.dot(c)) / (cc * ff);
}

int active_terms(const ComplexVector& f) {
  int n = 0;
  for (int j = 0; j < f.size(); ++j) n += f[j] != Complex(0.0, 0.0);
  return n;
}

}  // namespace

GridAperture grid_aperture(const GridSpec& grid, Vec2 centre, double radius,
                           Weighting weighting, double w0) {
  if (centre.x - radius < grid.x_min() || centre.x + radius > grid.x_max() ||
      centre.y - radius < grid.y_min() || centre.y + radius > grid.y_max()) {
    throw InvalidArgument("aperture extends beyond the grid");
  }
  GridAperture ap;
  const int ix0 = static_cast<int>(std::floor((centre.x - radius - grid.origin.x) / grid.pitch)) + grid.nx / 2;
  const int ix1 = static_cast<int>(std::ceil((centre.x + radius - grid.origin.x) / grid.pitch)) + grid.nx / 2;
  const int iy0 = static_cast<int>(std::floor((centre.y - radius - grid.origin.y) / grid.pitch)) + grid.ny / 2;
  const int iy1 = static_cast<int>(std::ceil((centre.y + radius - grid.origin.y) / grid.pitch)) + grid.ny / 2;
  std::vector<double> w;
  for (int iy = std::max(0, iy0); iy <= std::min(grid.ny - 1, iy1); ++iy) {
    for (int ix = std::max(0, ix0); ix <= std::min(grid.nx - 1, ix1); ++ix) {
      const Vec2 d = grid.position(ix, iy) - centre;
      if (d.norm2() >= radius * radius) continue;
      ap.pixels.push_back(static_cast<std::size_t>(iy) * grid.nx + ix);
      ap.samples.offsets.push_back(d);
      w.push_back(weighting == Weighting::Mode ? std::exp(-2.0 * d.norm2() / (w0 * w0)) : 1.0);
    }
  }
  if (w.empty()) throw InvalidArgument("aperture contains no pixels");
  ap.samples.weights = Eigen::Map<RealVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  ap.samples.weights /= ap.samples.weights.sum();
  return ap;
}

namespace {

Vec2 aperture_centre(const GratingDesign& d, int index) {
  return d.layout.coords.at(index);
}

}  // namespace

HadamardFactors hadamard_decompose(const ComplexMatrix& t, Decomposition strategy) {
  if (t.size() == 0) throw InvalidArgument("hadamard_decompose: empty matrix");
  if (!t.allFinite()) throw InvalidArgument("hadamard_decompose: non-finite entries");
  HadamardFactors h;
  h.a.resize(t.rows(), t.cols());
  h.b.resize(t.rows(), t.cols());
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double mag = std::abs(t(i, j));
      const double r = std::sqrt(mag);
      h.a(i, j) = mag > 0.0 ? t(i, j) / r : Complex(0.0, 0.0);
      h.b(i, j) = r;
    }
  }
  if (strategy == Decomposition::Symmetric) return h;

  // Row scales s and column scales c with sum_m |T_mn| s_m^2 c_n^2 = 1 for
  // every column and sum_n |T_mn| / (s_m^2 c_n^2) = 1 for every row.
  const RealMatrix mag = t.cwiseAbs();
  RealVector s = RealVector::Ones(t.rows());
  RealVector c = RealVector::Ones(t.cols());
  for (int it = 0; it < 500; ++it) {
    RealVector c_new(c.size());
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const double col = mag.col(j).dot(s.cwiseAbs2());
      c_new[j] = col > 0.0 ? 1.0 / std::sqrt(col) : 1.0;
    }
    RealVector s_new(s.size());
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double row = mag.row(i).dot(c_new.cwiseAbs2().cwiseInverse());
      s_new[i] = row > 0.0 ? std::sqrt(row) : 1.0;
    }
    s_new /= std::sqrt(s_new.squaredNorm() / s_new.size());
    const double change = (s_new - s).cwiseAbs().maxCoeff() + (c_new - c).cwiseAbs().maxCoeff();
    s = s_new;
    c = c_new;
    if (change < 1e-14) break;
  }
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double g = s[i] * c[j];
      h.a(i, j) *= g;
      h.b(i, j) /= g;
    }
  }
  return h;
}

GratingDesign GratingDesign::from_target(const ComplexMatrix& t, const ModeLayout& layout,
                                         Decomposition strategy) {
  if (t.rows() != t.cols() || t.rows() != layout.size()) {
    throw InvalidArgument("GratingDesign: target must be N x N for an N-mode layout");
  }
  HadamardFactors h = hadamard_decompose(t, strategy);
  GratingDesign d;
  d.a = std::move(h.a);
  d.b = std::move(h.b);
  d.mu = ComplexMatrix::Ones(t.rows(), t.cols());
  d.nu = ComplexMatrix::Ones(t.rows(), t.cols());
  d.layout = layout;
  return d;
}

Vec2 GratingDesign::wave_vector(int m, int n) const {
  const double k = layout.wavenumber();
  return (layout.coords.at(n) - layout.coords.at(m)) * (k / (2.0 * layout.focal));
}

ComplexVector GratingDesign::factor(Side side, int index) const {
  return side == Side::Splitter ? ComplexVector(a.col(index))
                                : ComplexVector(b.row(index).transpose());
}

ComplexVector GratingDesign::coefficients(Side side, int index) const {
  return side == Side::Splitter ? ComplexVector(mu.col(index))
                                : ComplexVector(nu.row(index).transpose());
}

void GratingDesign::set_coefficients(Side side, int index, const ComplexVector& z) {
  if (side == Side::Splitter) {
    mu.col(index) = z;
  } else {
    nu.row(index) = z.transpose();
  }
}

nlohmann::json report_to_json(const SynthesisReport& r) {
  return {{"fidelity_A", r.fidelity_a},     {"fidelity_B", r.fidelity_b},
          {"fidelity_T", r.fidelity_t},     {"efficiency_A", r.efficiency_a},
          {"efficiency_B", r.efficiency_b}, {"efficiency_T", r.efficiency_t},
          {"iterations", r.iterations},     {"converged", r.converged}};
}

ApertureSamples sample_aperture(const ModeLayout& layout, double pitch,
                                Weighting weighting) {
  if (!(pitch > 0.0)) throw InvalidArgument("sample_aperture: pitch must be positive");
  const double r = layout.aperture_radius;
  const int reach = static_cast<int>(std::ceil(r / pitch));
  ApertureSamples s;
  std::vector<double> w;
  for (int j = -reach; j <= reach; ++j) {
    for (int i = -reach; i <= reach; ++i) {
      const Vec2 d{i * pitch, j * pitch};
      if (d.norm2() >= r * r) continue;
      s.offsets.push_back(d);
      w.push_back(weighting == Weighting::Mode
                      ? std::exp(-2.0 * d.norm2() / (layout.waist * layout.waist))
                      : 1.0);
    }
  }
  s.weights = Eigen::Map<RealVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  s.weights /= s.weights.sum();
  return s;
}

GratingBasis::GratingBasis(const GratingDesign& design, Side side, int index,
                           const ApertureSamples& samples)
    : waves_(design.size(), static_cast<Eigen::Index>(samples.offsets.size())),
      weights_(samples.weights) {
  const double sign = side == Side::Splitter ? 1.0 : -1.0;
  for (int j = 0; j < design.size(); ++j) {
    const Vec2 k = side == Side::Splitter ? design.wave_vector(j, index)
                                          : design.wave_vector(index, j);
    for (std::size_t p = 0; p < samples.offsets.size(); ++p) {
      waves_(j, static_cast<Eigen::Index>(p)) = std::polar(1.0, sign * k.dot(samples.offsets[p]));
    }
  }
}

GratingBasis::GratingBasis(const std::vector<Vec2>& waves, const ApertureSamples& samples)
    : waves_(static_cast<Eigen::Index>(waves.size()),
             static_cast<Eigen::Index>(samples.offsets.size())),
      weights_(samples.weights) {
  for (std::size_t j = 0; j < waves.size(); ++j) {
    for (std::size_t p = 0; p < samples.offsets.size(); ++p) {
      waves_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p)) =
          std::polar(1.0, waves[j].dot(samples.offsets[p]));
    }
  }
}

ComplexVector GratingBasis::phase_only(const ComplexVector& z, const ComplexVector& f) const {
  const ComplexVector s = waves_.transpose() * z.cwiseProduct(f);
  ComplexVector h(s.size());
  for (Eigen::Index p = 0; p < s.size(); ++p) {
    const double mag = std::abs(s[p]);
    h[p] = mag > kTiny ? s[p] / mag : Complex(1.0, 0.0);
  }
  return h;
}

ComplexVector GratingBasis::coefficients(const ComplexVector& h) const {
  return waves_.conjugate() * weights_.cast<Complex>().cwiseProduct(h);
}

double GratingBasis::fidelity(const ComplexVector& z, const ComplexVector& f,
                              ComplexVector* grad, ComplexVector* coeffs) const {
  const ComplexVector zf = z.cwiseProduct(f);
  const ComplexVector s = waves_.transpose() * zf;
  ComplexVector h(s.size());
  RealVector mag(s.size());
  for (Eigen::Index p = 0; p < s.size(); ++p) {
    mag[p] = std::max(std::abs(s[p]), kTiny);
    h[p] = s[p] / mag[p];
  }
  const ComplexVector c = waves_.conjugate() * weights_.cast<Complex>().cwiseProduct(h);
  if (coeffs) *coeffs = c;
  const double fid = vec_fidelity(c, f);
  if (!grad) return fid;

  // Adjoint of c -> F, pulled back through the phase-only projection.
  const Complex sf = f.dot(c);
  const double cc = c.squaredNorm();
  const double ff = f.squaredNorm();
  const ComplexVector g = (sf * cc * f - std::norm(sf) * c) / (cc * cc * ff);
  const ComplexVector v = (waves_.transpose() * g).conjugate();
  ComplexVector q(s.size());
  for (Eigen::Index p = 0; p < s.size(); ++p) {
    const double re_t = -weights_[p] * (h[p] * v[p]).imag();
    q[p] = re_t * h[p] / mag[p];
  }
  const ComplexVector back = waves_.conjugate() * q;
  *grad = (Complex(0.0, 2.0) * f.conjugate().cwiseProduct(back));
  return fid;
}

namespace {

ComplexVector fd_gradient(const GratingBasis& basis, const ComplexVector& z,
                          const ComplexVector& f, const OptimizeOptions& opts) {
  ComplexVector g = ComplexVector::Zero(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (f[j] == Complex(0.0, 0.0)) continue;
    const double h = opts.fd_step * std::max(std::abs(z[j]), 1e-3);
    const int parts = opts.model == CoefficientModel::Complex ? 2 : 1;
    for (int part = 0; part < parts; ++part) {
      const Complex dz = part == 0 ? Complex(h, 0.0) : Complex(0.0, h);
      ComplexVector zp = z, zm = z;
      zp[j] += dz;
      zm[j] -= dz;
      const double d = (basis.fidelity(zp, f) - basis.fidelity(zm, f)) / (2.0 * h);
      g[j] += part == 0 ? Complex(d, 0.0) : Complex(0.0, d);
    }
  }
  return g;
}

ComplexVector constrain(ComplexVector z, const ComplexVector& f, CoefficientModel model) {
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (f[j] == Complex(0.0, 0.0)) {
      z[j] = 0.0;
    } else if (model == CoefficientModel::Real) {
      z[j] = std::max(z[j].real(), 0.0);
    }
  }
  return z;
}

}  // namespace

CoefficientFit fit_grating(const GratingBasis& basis, const ComplexVector& f,
                           const ComplexVector& z0, const OptimizeOptions& opts) {
  if (f.size() != basis.terms() || z0.size() != f.size()) {
    throw InvalidArgument("fit_grating: size mismatch");
  }
  if (active_terms(f) == 0) throw InvalidArgument("fit_grating: all-zero factor");

  CoefficientFit fit;
  ComplexVector c;
  ComplexVector z = constrain(z0, f, opts.model);
  double fid = basis.fidelity(z, f, nullptr, &c);
  fit.initial_fidelity = fid;
  fit.initial_efficiency = c.squaredNorm();
  fit.history.push_back(1.0 - fid);

  auto finish = [&](bool converged) {
    fit.z = z;
    fit.coefficients = c;
    fit.fidelity = fid;
    fit.efficiency = c.squaredNorm();
    fit.converged = converged;
    return fit;
  };

  if (active_terms(f) == 1 || 1.0 - fid < opts.target_infidelity) return finish(true);

  // Fixed-point warm start: rescale each coefficient by the ratio between the
  // wanted and the delivered amplitude.
  for (int it = 0; it < opts.warm_start_iterations; ++it) {
    const Complex lambda = f.dot(c) / f.squaredNorm();
    ComplexVector trial = z;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      if (f[j] == Complex(0.0, 0.0) || std::abs(c[j]) < kTiny) continue;
      const Complex r = f[j] * lambda / c[j];
      const double beta = opts.warm_start_relaxation;
      trial[j] *= opts.model == CoefficientModel::Complex
                      ? std::polar(std::pow(std::abs(r), beta), beta * std::arg(r))
                      : Complex(std::pow(std::abs(r), beta), 0.0);
    }
    trial = constrain(trial, f, opts.model);
    ComplexVector ct;
    const double ft = basis.fidelity(trial, f, nullptr, &ct);
    ++fit.iterations;
    if (!(ft > fid)) break;
    z = trial;
    c = ct;
    fid = ft;
    fit.history.push_back(1.0 - fid);
    if (1.0 - fid < opts.target_infidelity) return finish(true);
  }

  double step = opts.step;
  ComplexVector grad;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (opts.gradient == GradientMethod::Adjoint) {
      basis.fidelity(z, f, &grad);
      if (opts.model == CoefficientModel::Real) grad = grad.real().cast<Complex>();
    } else {
      grad = fd_gradient(basis, z, f, opts);
    }
    bool accepted = false;
    double gain = 0.0;
    while (step > 1e-14) {
      const ComplexVector trial = constrain(z + step * grad, f, opts.model);
      ComplexVector ct;
      const double ft = basis.fidelity(trial, f, nullptr, &ct);
      if (ft > fid) {
        gain = ft - fid;
        z = trial;
        c = ct;
        fid = ft;
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++fit.iterations;
    if (!accepted) return finish(true);
    fit.history.push_back(1.0 - fid);
    if (1.0 - fid < opts.target_infidelity || gain < opts.tolerance) return finish(true);
  }
  return finish(false);
}

double matrix_fidelity(const ComplexMatrix& x_exp, const ComplexMatrix& x) {
  if (x_exp.rows() != x.rows() || x_exp.cols() != x.cols()) {
    throw InvalidArgument("matrix_fidelity: shape mismatch");
  }
  const double ee = x_exp.squaredNorm();
  const double xx = x.squaredNorm();
  if (ee <= 0.0 || xx <= 0.0) throw InvalidArgument("matrix_fidelity: zero matrix");
  const Complex overlap = (x.adjoint() * x_exp).trace();
  return std::min(1.0, std::norm(overlap) / (ee * xx));
}

double matrix_efficiency(const ComplexMatrix& x_exp, const ComplexMatrix& x) {
  if (x_exp.rows() != x.rows() || x_exp.cols() != x.cols()) {
    throw InvalidArgument("matrix_efficiency: shape mismatch");
  }
  const double xx = x.squaredNorm();
  if (xx <= 0.0) throw InvalidArgument("matrix_efficiency: zero reference");
  return x_exp.squaredNorm() / xx;
}

ComplexMatrix normalized_factor(const GratingDesign& design, Side side) {
  ComplexMatrix out = side == Side::Splitter ? design.a : design.b;
  if (side == Side::Splitter) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const double n = out.col(j).norm();
      if (n > 0.0) out.col(j) /= n;
    }
  } else {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double n = out.row(i).norm();
      if (n > 0.0) out.row(i) /= n;
    }
  }
  return out;
}

namespace {

void place(ComplexMatrix& m, Side side, int index, const ComplexVector& v) {
  if (side == Side::Splitter) {
    m.col(index) = v;
  } else {
    m.row(index) = v.transpose();
  }
}

SideResult run_side(const GratingDesign& design, Side side, const ApertureSamples& samples,
                    const OptimizeOptions* opts) {
  const int n = design.size();
  SideResult r;
  r.coefficients = side == Side::Splitter ? design.mu : design.nu;
  r.implemented = ComplexMatrix::Zero(n, n);
  for (int idx = 0; idx < n; ++idx) {
    const ComplexVector f = design.factor(side, idx);
    if (active_terms(f) == 0) continue;
    GratingBasis basis(design, side, idx, samples);
    ComplexVector z = design.coefficients(side, idx);
    ComplexVector c;
    if (opts) {
      CoefficientFit fit = fit_grating(basis, f, z, *opts);
      z = fit.z;
      c = fit.coefficients;
      r.iterations = std::max(r.iterations, fit.iterations);
      r.converged = r.converged && fit.converged;
    } else {
      c = basis.coefficients(basis.phase_only(z, f));
    }
    place(r.coefficients, side, idx, z);
    place(r.implemented, side, idx, c);
  }
  const ComplexMatrix ref = normalized_factor(design, side);
  r.fidelity = matrix_fidelity(r.implemented, ref);
  r.efficiency = matrix_efficiency(r.implemented, ref);
  return r;
}

}  // namespace

SideResult evaluate_side(const GratingDesign& design, Side side,
                         const ApertureSamples& samples) {
  return run_side(design, side, samples, nullptr);
}

SideResult optimize_coefficients(const GratingDesign& design, Side side,
                                 const ApertureSamples& samples,
                                 const OptimizeOptions& opts) {
  return run_side(design, side, samples, &opts);
}

namespace {

SynthesisReport combine(const GratingDesign& design, const SideResult& a,
                        const SideResult& b) {
  SynthesisReport r;
  r.fidelity_a = a.fidelity;
  r.fidelity_b = b.fidelity;
  r.efficiency_a = a.efficiency;
  r.efficiency_b = b.efficiency;
  r.fidelity_t = matrix_fidelity(a.implemented.cwiseProduct(b.implemented), design.target());
  r.efficiency_t = a.efficiency * b.efficiency;
  r.iterations = std::max(a.iterations, b.iterations);
  r.converged = a.converged && b.converged;
  return r;
}

}  // namespace

SynthesisReport evaluate(const GratingDesign& design, const ApertureSamples& samples) {
  return combine(design, evaluate_side(design, Side::Splitter, samples),
                 evaluate_side(design, Side::Combiner, samples));
}

std::pair<GratingDesign, SynthesisReport> synthesize(const ComplexMatrix& t,
                                                     const ModeLayout& layout,
                                                     const SynthesisOptions& opts) {
  GratingDesign d = GratingDesign::from_target(t, layout, opts.decomposition);
  const ApertureSamples samples = sample_aperture(layout, opts.pitch, opts.weighting);
  if (!opts.optimize) {
    SynthesisReport r = evaluate(d, samples);
    return {std::move(d), r};
  }
  SideResult a = optimize_coefficients(d, Side::Splitter, samples, opts.optimizer);
  SideResult b = optimize_coefficients(d, Side::Combiner, samples, opts.optimizer);
  d.mu = a.coefficients;
  d.nu = b.coefficients;
  SynthesisReport r = combine(d, a, b);
  return {std::move(d), r};
}

SampledField ideal_splitting_grating(const GratingDesign& design, int n,
                                     const GridSpec& grid) {
  if (n < 0 || n >= design.size()) throw InvalidArgument("ideal_splitting_grating: bad index");
  const GridAperture ap = grid_aperture(grid, aperture_centre(design, n),
                                        design.layout.aperture_radius, Weighting::Uniform,
                                        design.layout.waist);
  const ComplexVector f = design.factor(Side::Splitter, n);
  SampledField out(grid);
  for (std::size_t p = 0; p < ap.pixels.size(); ++p) {
    Complex s(0.0, 0.0);
    const Vec2 d = ap.samples.offsets[p];
    for (int m = 0; m < design.size(); ++m) {
      s += f[m] * std::polar(1.0, design.wave_vector(m, n).dot(d));
    }
    out.data()[ap.pixels[p]] = s;
  }
  return out;
}

SampledField phase_only_grating(const GratingDesign& design, Side side, int index,
                                const GridSpec& grid) {
  if (index < 0 || index >= design.size()) throw InvalidArgument("phase_only_grating: bad index");
  const ComplexVector f = design.factor(side, index);
  const ComplexVector z = design.coefficients(side, index);
  if (active_terms(z.cwiseProduct(f)) == 0) {
    throw InvalidArgument("phase_only_grating: all-zero factor slice has no phase");
  }
  const GridAperture ap = grid_aperture(grid, aperture_centre(design, index),
                                        design.layout.aperture_radius, Weighting::Uniform,
                                        design.layout.waist);
  GratingBasis basis(design, side, index, ap.samples);
  const ComplexVector h = basis.phase_only(z, f);
  SampledField out(grid);
  for (std::size_t p = 0; p < ap.pixels.size(); ++p) out.data()[ap.pixels[p]] = h[static_cast<Eigen::Index>(p)];
  return out;
}

ComplexMatrix extract_matrix(const std::vector<SampledField>& gratings,
                             const GratingDesign& design, Side side, Weighting weighting) {
  const int n = design.size();
  if (static_cast<int>(gratings.size()) != n) {
    throw InvalidArgument("extract_matrix: need one grating per column/row");
  }
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int idx = 0; idx < n; ++idx) {
    const SampledField& g = gratings[idx];
    const GridAperture ap = grid_aperture(g.grid(), aperture_centre(design, idx),
                                          design.layout.aperture_radius, weighting,
                                          design.layout.waist);
    GratingBasis basis(design, side, idx, ap.samples);
    ComplexVector h(static_cast<Eigen::Index>(ap.pixels.size()));
    for (std::size_t p = 0; p < ap.pixels.size(); ++p) h[static_cast<Eigen::Index>(p)] = g.data()[ap.pixels[p]];
    place(out, side, idx, basis.coefficients(h));
  }
  return out;
}

}  // namespace spatialq
