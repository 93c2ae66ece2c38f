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


#include "spatialq/optsim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

#include "spatialq/fft.hpp"

namespace spatialq {

namespace {

constexpr double kSpectralTail = 1e-6;
constexpr double kBorderPower = 1e-4;
// Phase-only masks throw a few percent of the power into high orders that
// spread over the whole window; wrap-around of that stray light does not
// reach the detected modes at a measurable level.
constexpr double kTrainBorderPower = 5e-2;
constexpr double kBorderFraction = 0.02;

std::vector<double> frequencies(int n, double pitch) {
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = (i <= (n - 1) / 2 ? i : i - n) / (n * pitch);
  return f;
}

Complex carrier(const SetupConfig& c, double x) {
  return std::polar(1.0, kTwoPi * x / (c.grating_period * c.grid.pitch));
}

// 8-bit phase levels on top of the blazed carrier, read back in the
// first-order frame.
Complex realize(const SetupConfig& c, double x, Complex ideal) {
  if (!c.use_blazed_carrier) return ideal;
  const Complex full = ideal * carrier(c, x);
  double ph = std::arg(full);
  if (ph < 0.0) ph += kTwoPi;
  const double q = std::round(ph / kTwoPi * 256.0) * kTwoPi / 256.0;
  return std::polar(std::abs(ideal), q) * std::conj(carrier(c, x));
}

double path_theta(const ModeLayout& l, int m, int n) {
  return l.wavenumber() * (l.coords[n] - l.coords[m]).norm2() / (4.0 * l.focal);
}

double path_delta(const ModeLayout& l, int m) {
  return l.wavenumber() * l.coords[m].norm2() / (4.0 * l.focal);
}

// Tilt sending light from spot n on SLM1 to spot m on SLM2.
Vec2 route(const ModeLayout& l, int n, int m) {
  return (l.coords[m] - l.coords[n]) * (l.wavenumber() / (2.0 * l.focal));
}

ComplexMatrix implemented_splitter(const GratingDesign& d, const SetupConfig& c) {
  if (!c.phase_error) return d.a;
  const RealMatrix& e = *c.phase_error;
  if (e.rows() != d.a.rows() || e.cols() != d.a.cols()) {
    throw InvalidArgument("phase_error shape does not match the design");
  }
  ComplexMatrix a = d.a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) *= std::polar(1.0, e(i, j));
  }
  return a;
}

std::vector<GridAperture> spot_apertures(const SetupConfig& c) {
  std::vector<GridAperture> out;
  out.reserve(c.layout.size());
  for (int n = 0; n < c.layout.size(); ++n) {
    out.push_back(grid_aperture(c.grid, c.layout.coords[n], c.layout.aperture_radius,
                                Weighting::Mode, c.layout.waist));
  }
  return out;
}

// Mask values on each aperture's pixels, in aperture order.
std::vector<ComplexVector> slm1_values(const GratingDesign& design, const SetupConfig& c,
                                       const std::vector<GridAperture>& aps) {
  const ModeLayout& l = c.layout;
  const int n_modes = l.size();
  const ComplexMatrix a = implemented_splitter(design, c);
  const double k = l.wavenumber();
  const double amp = std::sqrt(c.modulation_efficiency);
  std::vector<ComplexVector> out(n_modes);
  for (int n = 0; n < n_modes; ++n) {
    const GridAperture& ap = aps[n];
    const Vec2 kn = l.coords[n] * (k / (2.0 * l.focal));
    ComplexVector s = ComplexVector::Zero(static_cast<Eigen::Index>(ap.pixels.size()));
    for (int m = 0; m < n_modes; ++m) {
      const Complex w = design.mu(m, n) * a(m, n);
      if (w == Complex(0.0, 0.0)) continue;
      const Vec2 q = route(l, n, m) - kn;
      const double theta = c.compensate_paths ? path_theta(l, m, n) : 0.0;
      for (std::size_t p = 0; p < ap.pixels.size(); ++p) {
        s[static_cast<Eigen::Index>(p)] += w * std::polar(1.0, q.dot(ap.samples.offsets[p]) - theta);
      }
    }
    if (s.cwiseAbs().maxCoeff() == 0.0) {
      throw InvalidArgument("slm1_mask: all-zero splitter column");
    }
    const double delta = c.compensate_paths ? path_delta(l, n) : 0.0;
    ComplexVector v(s.size());
    for (Eigen::Index p = 0; p < s.size(); ++p) {
      const Vec2 d = ap.samples.offsets[static_cast<std::size_t>(p)];
      const double ph = std::arg(s[p]) - delta - k * d.norm2() / (2.0 * l.focal);
      const double x = l.coords[n].x + d.x;
      v[p] = realize(c, x, std::polar(amp, ph));
    }
    out[n] = std::move(v);
  }
  return out;
}

std::vector<ComplexVector> slm2_values(const GratingDesign& design, const SetupConfig& c,
                                       const std::vector<GridAperture>& aps) {
  const ModeLayout& l = c.layout;
  const int n_modes = l.size();
  const double k = l.wavenumber();
  const double amp = std::sqrt(c.modulation_efficiency);
  std::vector<ComplexVector> out(n_modes);
  for (int m = 0; m < n_modes; ++m) {
    const GridAperture& ap = aps[m];
    ComplexVector s = ComplexVector::Zero(static_cast<Eigen::Index>(ap.pixels.size()));
    for (int n = 0; n < n_modes; ++n) {
      const Complex w = design.nu(m, n) * design.b(m, n);
      if (w == Complex(0.0, 0.0)) continue;
      const Vec2 q = route(l, n, m);
      for (std::size_t p = 0; p < ap.pixels.size(); ++p) {
        s[static_cast<Eigen::Index>(p)] += w * std::polar(1.0, -q.dot(ap.samples.offsets[p]));
      }
    }
    if (s.cwiseAbs().maxCoeff() == 0.0) {
      throw InvalidArgument("slm2_mask: all-zero combiner row");
    }
    ComplexVector v(s.size());
    for (Eigen::Index p = 0; p < s.size(); ++p) {
      const Vec2 d = ap.samples.offsets[static_cast<std::size_t>(p)];
      const Vec2 r = l.coords[m] + d;
      const double ph = std::arg(s[p]) - k * d.norm2() / (2.0 * l.focal) -
                        k * r.norm2() / (2.0 * l.focal);
      v[p] = realize(c, r.x, std::polar(amp, ph));
    }
    out[m] = std::move(v);
  }
  return out;
}

SampledField scatter(const GridSpec& grid, const std::vector<GridAperture>& aps,
                     const std::vector<ComplexVector>& values) {
  SampledField f(grid);
  for (std::size_t n = 0; n < aps.size(); ++n) {
    for (std::size_t p = 0; p < aps[n].pixels.size(); ++p) {
      f.data()[aps[n].pixels[p]] = values[n][static_cast<Eigen::Index>(p)];
    }
  }
  return f;
}

void check_band_limit(const std::vector<Complex>& spectrum, const GridSpec& g) {
  const auto fx = frequencies(g.nx, g.pitch);
  const auto fy = frequencies(g.ny, g.pitch);
  const double nyq = 0.5 / g.pitch;
  double total = 0.0, tail = 0.0, fmax = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const double p = std::norm(spectrum[static_cast<std::size_t>(iy) * g.nx + ix]);
      total += p;
      const double fr = std::max(std::abs(fx[ix]), std::abs(fy[iy]));
      if (fr > 0.9 * nyq) tail += p;
    }
  }
  if (total > 0.0 && tail > kSpectralTail * total) {
    // Find the smallest frequency bound that holds all but the tolerated tail.
    std::vector<std::pair<double, double>> bins;
    bins.reserve(spectrum.size());
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        bins.emplace_back(std::max(std::abs(fx[ix]), std::abs(fy[iy])),
                          std::norm(spectrum[static_cast<std::size_t>(iy) * g.nx + ix]));
      }
    }
    std::sort(bins.begin(), bins.end());
    double acc = total;
    for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
      acc -= it->second;
      if (acc < (1.0 - kSpectralTail) * total) {
        fmax = it->first;
        break;
      }
    }
    const double required = 0.9 / (2.0 * std::max(fmax, nyq));
    std::ostringstream os;
    os << "propagation: field is not band-limited on this grid (" << tail / total
       << " of the power above 0.9 Nyquist); pitch must be <= " << required << " m";
    throw AliasingError(os.str(), required);
  }
}

void check_border(const std::vector<Complex>& field, const GridSpec& g, double reference,
                  double tolerance) {
  const int bx = std::max(1, static_cast<int>(kBorderFraction * g.nx));
  const int by = std::max(1, static_cast<int>(kBorderFraction * g.ny));
  double edge = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    const bool row_edge = iy < by || iy >= g.ny - by;
    for (int ix = 0; ix < g.nx; ++ix) {
      if (row_edge || ix < bx || ix >= g.nx - bx) {
        edge += std::norm(field[static_cast<std::size_t>(iy) * g.nx + ix]);
      }
    }
  }
  if (reference > 0.0 && edge > tolerance * reference) {
    const double required = 2.0 * g.pitch;
    std::ostringstream os;
    os << "propagation: field reaches the window edge (" << edge / reference
       << " of the power) and wraps around; enlarge the window, e.g. pitch "
       << required << " m at the same sample count";
    throw AliasingError(os.str(), required);
  }
}

}  // namespace

void SetupConfig::validate() const {
  layout.validate();
  if (grid.nx < 8 || grid.ny < 8 || !(grid.pitch > 0.0)) {
    throw InvalidArgument("setup: invalid grid");
  }
  if (grating_period < 2) throw InvalidArgument("setup: grating period must be >= 2 px");
  if (!(modulation_efficiency > 0.0) || modulation_efficiency > 1.0) {
    throw InvalidArgument("setup: modulation efficiency must be in (0, 1]");
  }
  if (slm_separation < 0.0 || pinhole_radius < 0.0 || slm0_aperture_radius < 0.0) {
    throw InvalidArgument("setup: lengths must be non-negative");
  }
  if (layout.waist / grid.pitch < 4.0) {
    throw InvalidArgument("setup: waist must span at least 4 pixels");
  }
  const double required = band_limit_pitch();
  if (grid.pitch > required) {
    std::ostringstream os;
    os << "setup: grid pitch " << grid.pitch << " m undersamples the optical train; pitch must be <= "
       << required << " m";
    throw AliasingError(os.str(), required);
  }
  const double span = 2.0 * (layout.radius() + layout.aperture_radius);
  if (span > 0.9 * std::min(grid.nx, grid.ny) * grid.pitch) {
    throw InvalidArgument("setup: the spot circle does not fit in the simulation window");
  }
}

double SetupConfig::band_limit_pitch() const {
  const double lam = layout.wavelength;
  const double f = layout.focal;
  const double r = layout.radius();
  const double a = layout.aperture_radius;
  // Spatial-frequency half-width of a waist-w0 spot at the 1e-6 power level.
  const double spot = std::sqrt(std::log(1e6) / 2.0) / (kPi * layout.waist);
  const double launch = r / (lam * separation()) + a / (lam * separation());
  const double routed = 2.0 * r / (lam * separation()) + a / (lam * f);
  const double focused = (r + a) / (lam * f);
  const double fmax = std::max({launch, routed, focused}) + spot;
  return 0.9 / (2.0 * fmax);
}

nlohmann::json setup_to_json(const SetupConfig& c) {
  nlohmann::json j = {{"layout", layout_to_json(c.layout)},
                      {"grid", {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"pitch_m", c.grid.pitch}}},
                      {"grating_period_px", c.grating_period},
                      {"use_blazed_carrier", c.use_blazed_carrier},
                      {"slm_separation_m", c.separation()},
                      {"pinhole_radius_m", c.pinhole()},
                      {"slm0_aperture_radius_m", c.slm0_aperture()},
                      {"modulation_efficiency", c.modulation_efficiency},
                      {"compensate_paths", c.compensate_paths}};
  if (c.phase_error) {
    nlohmann::json e = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.phase_error->rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < c.phase_error->cols(); ++k) row.push_back((*c.phase_error)(i, k));
      e.push_back(row);
    }
    j["phase_error_rad"] = e;
  }
  return j;
}

SetupConfig setup_from_json(const nlohmann::json& j) {
  SetupConfig c;
  c.layout = layout_from_json(j.at("layout"));
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid.nx = g.value("nx", c.grid.nx);
    c.grid.ny = g.value("ny", c.grid.ny);
    c.grid.pitch = g.value("pitch_m", c.grid.pitch);
  }
  c.grating_period = j.value("grating_period_px", c.grating_period);
  c.use_blazed_carrier = j.value("use_blazed_carrier", c.use_blazed_carrier);
  c.slm_separation = j.value("slm_separation_m", c.slm_separation);
  c.pinhole_radius = j.value("pinhole_radius_m", c.pinhole_radius);
  c.slm0_aperture_radius = j.value("slm0_aperture_radius_m", c.slm0_aperture_radius);
  c.modulation_efficiency = j.value("modulation_efficiency", c.modulation_efficiency);
  c.compensate_paths = j.value("compensate_paths", c.compensate_paths);
  if (j.contains("phase_error_rad")) {
    const auto& e = j.at("phase_error_rad");
    RealMatrix m(static_cast<Eigen::Index>(e.size()), static_cast<Eigen::Index>(e.at(0).size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = e.at(i).at(k).get<double>();
    }
    c.phase_error = m;
  }
  c.validate();
  return c;
}

SetupConfig desk_setup(int n, const DeskScale& scale) {
  SetupConfig c;
  c.layout = desk_circle_layout(n, scale);
  c.grid.pitch = scale.pitch;
  c.validate();
  return c;
}

Vec2 PrepSpec::launch_tilt(const ModeLayout& layout, int n) {
  return layout.coords.at(n) * (layout.wavenumber() / (2.0 * layout.focal));
}

SampledField fresnel_propagate(const SampledField& field, double distance, double wavelength) {
  if (distance == 0.0) return field;
  const GridSpec& g = field.grid();
  std::vector<Complex> buf(field.data().begin(), field.data().end());
  const double before = field.power() / (g.pitch * g.pitch);
  Fft2 fft(g.nx, g.ny);
  fft.forward(buf);
  check_band_limit(buf, g);
  const auto fx = frequencies(g.nx, g.pitch);
  const auto fy = frequencies(g.ny, g.pitch);
  const double a = -kPi * wavelength * distance;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      buf[static_cast<std::size_t>(iy) * g.nx + ix] *=
          std::polar(1.0, a * (fx[ix] * fx[ix] + fy[iy] * fy[iy]));
    }
  }
  fft.inverse(buf);
  check_border(buf, g, before, kBorderPower);
  return SampledField(g, std::move(buf));
}

SampledField slm0_mask(const PrepSpec& prep, const SetupConfig& config) {
  const ModeLayout& l = config.layout;
  const int n_modes = l.size();
  if (prep.target_state.size() != n_modes) throw InvalidArgument("slm0_mask: state size mismatch");
  if (prep.target_state.cwiseAbs().maxCoeff() == 0.0) {
    throw InvalidArgument("slm0_mask: all-zero state has no phase");
  }
  const ComplexVector xi =
      prep.xi.size() == 0 ? ComplexVector::Ones(n_modes) : prep.xi;
  if (xi.size() != n_modes) throw InvalidArgument("slm0_mask: xi size mismatch");
  const GridAperture ap = grid_aperture(config.grid, {0.0, 0.0}, config.slm0_aperture(),
                                        Weighting::Uniform, l.waist);
  const double k = l.wavenumber();
  const double amp = std::sqrt(config.modulation_efficiency);
  SampledField f(config.grid);
  for (std::size_t p = 0; p < ap.pixels.size(); ++p) {
    const Vec2 r = ap.samples.offsets[p];
    Complex s(0.0, 0.0);
    for (int n = 0; n < n_modes; ++n) {
      const Complex w = xi[n] * prep.target_state[n];
      if (w != Complex(0.0, 0.0)) s += w * std::polar(1.0, PrepSpec::launch_tilt(l, n).dot(r));
    }
    const double ph = std::arg(s) - k * r.norm2() / (2.0 * config.separation());
    f.data()[ap.pixels[p]] = realize(config, r.x, std::polar(amp, ph));
  }
  return f;
}

SampledField slm1_mask(const GratingDesign& design, const SetupConfig& config) {
  const auto aps = spot_apertures(config);
  return scatter(config.grid, aps, slm1_values(design, config, aps));
}

SampledField slm2_mask(const GratingDesign& design, const SetupConfig& config) {
  const auto aps = spot_apertures(config);
  return scatter(config.grid, aps, slm2_values(design, config, aps));
}

PrepSpec optimize_prep(const StateVector& target, const SetupConfig& config,
                       const OptimizeOptions& opts) {
  const ModeLayout& l = config.layout;
  if (target.size() != l.size()) throw InvalidArgument("optimize_prep: size mismatch");
  const GridAperture ap = grid_aperture(config.grid, {0.0, 0.0}, config.slm0_aperture(),
                                        Weighting::Mode, l.waist);
  std::vector<Vec2> waves;
  for (int n = 0; n < l.size(); ++n) waves.push_back(PrepSpec::launch_tilt(l, n));
  GratingBasis basis(waves, ap.samples);
  CoefficientFit fit = fit_grating(basis, target, ComplexVector::Ones(l.size()), opts);
  return PrepSpec{target, fit.z};
}

GratingDesign optimize_for_setup(const GratingDesign& design, const SetupConfig& config,
                                 const OptimizeOptions& opts) {
  const ModeLayout& l = config.layout;
  const int n_modes = l.size();
  GratingDesign out = design;
  for (int n = 0; n < n_modes; ++n) {
    const ComplexVector col = design.a.col(n);
    if (col.cwiseAbs().maxCoeff() == 0.0) continue;
    const GridAperture ap = grid_aperture(config.grid, l.coords[n], l.aperture_radius,
                                          Weighting::Mode, l.waist);
    std::vector<Vec2> waves;
    ComplexVector f(n_modes);
    for (int m = 0; m < n_modes; ++m) {
      waves.push_back(route(l, n, m));
      const double theta = config.compensate_paths ? path_theta(l, m, n) : 0.0;
      f[m] = col[m] * std::polar(1.0, -theta);
    }
    GratingBasis basis(waves, ap.samples);
    out.mu.col(n) = fit_grating(basis, f, ComplexVector::Ones(n_modes), opts).z;
  }
  for (int m = 0; m < n_modes; ++m) {
    const ComplexVector row = design.b.row(m).transpose();
    if (row.cwiseAbs().maxCoeff() == 0.0) continue;
    const GridAperture ap = grid_aperture(config.grid, l.coords[m], l.aperture_radius,
                                          Weighting::Mode, l.waist);
    std::vector<Vec2> waves;
    for (int n = 0; n < n_modes; ++n) waves.push_back(-route(l, n, m));
    GratingBasis basis(waves, ap.samples);
    out.nu.row(m) = fit_grating(basis, row, ComplexVector::Ones(n_modes), opts).z.transpose();
  }
  return out;
}

struct TrainCache {
  std::mutex mutex;
  std::map<double, std::vector<Complex>> transfers;
  std::vector<GridAperture> apertures;
  /// Conjugated detection modes pulled back to just after SLM2, restricted
  /// to the aperture pixels (row m, concatenated apertures).
  ComplexMatrix detection;
  /// Field at SLM1 for single-mode launches, on the aperture pixels.
  std::vector<ComplexVector> launched;
  bool ready = false;
};

OpticalTrain::OpticalTrain(SetupConfig config)
    : config_(std::move(config)), cache_(std::make_shared<TrainCache>()) {
  config_.validate();
  cache_->apertures = spot_apertures(config_);
}

const std::vector<Complex>& OpticalTrain::transfer(double distance) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->transfers.find(distance);
  if (it != cache_->transfers.end()) return it->second;
  const GridSpec& g = config_.grid;
  const auto fx = frequencies(g.nx, g.pitch);
  const auto fy = frequencies(g.ny, g.pitch);
  const double a = -kPi * config_.layout.wavelength * distance;
  std::vector<Complex> h(g.size());
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      h[static_cast<std::size_t>(iy) * g.nx + ix] =
          std::polar(1.0, a * (fx[ix] * fx[ix] + fy[iy] * fy[iy]));
    }
  }
  return cache_->transfers.emplace(distance, std::move(h)).first->second;
}

void OpticalTrain::apply_transfer(SampledField& f, double distance) const {
  const GridSpec& g = config_.grid;
  const std::vector<Complex>& h = transfer(distance);
  const double before = f.power() / (g.pitch * g.pitch);
  Fft2 fft(g.nx, g.ny);
  auto data = f.data();
  fft.forward(data);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= h[i];
  fft.inverse(data);
  check_border({data.begin(), data.end()}, g, before, kTrainBorderPower);
}

SampledField OpticalTrain::input_beam() const {
  ModeLayout centred = config_.layout;
  centred.coords = {{0.0, 0.0}};
  return mode_field(centred, 0, config_.grid);
}

SampledField OpticalTrain::launch(const PrepSpec& prep) const {
  SampledField u = input_beam();
  u *= slm0_mask(prep, config_);
  return u;
}

SampledField OpticalTrain::ideal_launch(const StateVector& amps) const {
  const ModeLayout& l = config_.layout;
  if (amps.size() != l.size()) throw InvalidArgument("ideal_launch: size mismatch");
  const SampledField beam = input_beam();
  const GridAperture ap = grid_aperture(config_.grid, {0.0, 0.0}, config_.slm0_aperture(),
                                        Weighting::Uniform, l.waist);
  const double k = l.wavenumber();
  SampledField f(config_.grid);
  for (std::size_t p = 0; p < ap.pixels.size(); ++p) {
    const Vec2 r = ap.samples.offsets[p];
    Complex s(0.0, 0.0);
    for (int n = 0; n < l.size(); ++n) {
      if (amps[n] != Complex(0.0, 0.0)) s += amps[n] * std::polar(1.0, PrepSpec::launch_tilt(l, n).dot(r));
    }
    const std::size_t i = ap.pixels[p];
    f.data()[i] = beam.data()[i] * s *
                  std::polar(std::sqrt(config_.modulation_efficiency),
                             -k * r.norm2() / (2.0 * config_.separation()));
  }
  return f;
}

namespace {

void prepare(TrainCache& cache, const SetupConfig& c,
             const std::function<void(SampledField&, double)>& prop,
             const std::function<SampledField(const PrepSpec&)>& launch) {
  const ModeLayout& l = c.layout;
  const int n_modes = l.size();
  const double k = l.wavenumber();
  const double f = l.focal;
  std::size_t total = 0;
  for (const auto& ap : cache.apertures) total += ap.pixels.size();

  // Detection modes: the spot that a perfect combiner leaves at SLM2,
  // carried through the output lens, pinhole-free, to the port plane.
  const GridAperture pin = grid_aperture(c.grid, {0.0, 0.0}, c.pinhole(), Weighting::Uniform, l.waist);
  ComplexMatrix det(n_modes, static_cast<Eigen::Index>(total));
  for (int m = 0; m < n_modes; ++m) {
    SampledField v = mode_field(l, m, c.grid);
    const double sep = c.separation();
    for (int iy = 0; iy < c.grid.ny; ++iy) {
      for (int ix = 0; ix < c.grid.nx; ++ix) {
        Complex& u = v.at(ix, iy);
        if (u == Complex(0.0, 0.0)) continue;
        const Vec2 r = c.grid.position(ix, iy);
        const double d2 = (r - l.coords[m]).norm2();
        u *= std::polar(1.0, k * d2 / (2.0 * sep) - k * d2 / (2.0 * f) - k * r.norm2() / (2.0 * f));
      }
    }
    v *= Complex(1.0 / std::sqrt(v.power()), 0.0);
    // Port mode o_m = P(2f) v. Pulled back through P(f) . pinhole . P(f) it
    // becomes P(-f) [pinhole . P(-f) o_m] = P(-f) [pinhole . P(f) v].
    prop(v, f);
    SampledField masked(c.grid);
    for (std::size_t p = 0; p < pin.pixels.size(); ++p) masked.data()[pin.pixels[p]] = v.data()[pin.pixels[p]];
    prop(masked, -f);
    Eigen::Index col = 0;
    for (const auto& ap : cache.apertures) {
      for (std::size_t p = 0; p < ap.pixels.size(); ++p) {
        det(m, col++) = std::conj(masked.data()[ap.pixels[p]]);
      }
    }
  }
  cache.detection = det * (c.grid.pitch * c.grid.pitch);

  cache.launched.assign(n_modes, ComplexVector());
  for (int n = 0; n < n_modes; ++n) {
    StateVector e = StateVector::Zero(n_modes);
    e[n] = 1.0;
    SampledField u = launch(PrepSpec{e, {}});
    prop(u, c.separation());
    ComplexVector vals(static_cast<Eigen::Index>(total));
    Eigen::Index col = 0;
    for (const auto& ap : cache.apertures) {
      for (std::size_t p = 0; p < ap.pixels.size(); ++p) vals[col++] = u.data()[ap.pixels[p]];
    }
    cache.launched[n] = std::move(vals);
  }
  cache.ready = true;
}

}  // namespace

StateVector OpticalTrain::detect(const SampledField& after_slm2) const {
  std::size_t total = 0;
  for (const auto& ap : cache_->apertures) total += ap.pixels.size();
  ComplexVector vals(static_cast<Eigen::Index>(total));
  Eigen::Index col = 0;
  for (const auto& ap : cache_->apertures) {
    for (std::size_t p = 0; p < ap.pixels.size(); ++p) vals[col++] = after_slm2.data()[ap.pixels[p]];
  }
  return cache_->detection * vals;
}

StateVector OpticalTrain::propagate(const GratingDesign& design, const SampledField& after_slm0,
                                    PlaneFields* dump) const {
  if (!cache_->ready) {
    prepare(*cache_, config_,
            [this](SampledField& f, double z) { apply_transfer(f, z); },
            [this](const PrepSpec& p) { return launch(p); });
  }
  const double sep = config_.separation();
  SampledField u = after_slm0;
  if (dump) dump->planes.emplace_back("slm0_out", u);
  apply_transfer(u, sep);
  if (dump) dump->planes.emplace_back("slm1_in", u);
  u *= scatter(config_.grid, cache_->apertures, slm1_values(design, config_, cache_->apertures));
  apply_transfer(u, sep);
  if (dump) dump->planes.emplace_back("slm2_in", u);
  u *= scatter(config_.grid, cache_->apertures, slm2_values(design, config_, cache_->apertures));
  const StateVector out = detect(u);
  if (dump) {
    const double f = config_.layout.focal;
    apply_transfer(u, f);
    dump->planes.emplace_back("pinhole_in", u);
    const GridAperture pin = grid_aperture(config_.grid, {0.0, 0.0}, config_.pinhole(),
                                           Weighting::Uniform, config_.layout.waist);
    SampledField masked(config_.grid);
    for (std::size_t p : pin.pixels) masked.data()[p] = u.data()[p];
    apply_transfer(masked, f);
    dump->planes.emplace_back("output", masked);
  }
  return out;
}

StateVector OpticalTrain::run(const GratingDesign& design, const PrepSpec& prep) const {
  if (prep.target_state.size() == design.size() &&
      prep.target_state.cwiseAbs().maxCoeff() == 0.0) {
    return StateVector::Zero(design.size());
  }
  return propagate(design, launch(prep));
}

ComplexMatrix OpticalTrain::transfer_matrix(const GratingDesign& design) const {
  if (design.size() != config_.layout.size()) {
    throw InvalidArgument("transfer_matrix: design and setup disagree on N");
  }
  if (!cache_->ready) {
    prepare(*cache_, config_,
            [this](SampledField& f, double z) { apply_transfer(f, z); },
            [this](const PrepSpec& p) { return launch(p); });
  }
  const auto& aps = cache_->apertures;
  const auto m1 = slm1_values(design, config_, aps);
  const auto m2 = slm2_values(design, config_, aps);
  const int n_modes = design.size();
  ComplexMatrix t(n_modes, n_modes);
  for (int n = 0; n < n_modes; ++n) {
    SampledField u(config_.grid);
    Eigen::Index col = 0;
    for (std::size_t a = 0; a < aps.size(); ++a) {
      for (std::size_t p = 0; p < aps[a].pixels.size(); ++p) {
        u.data()[aps[a].pixels[p]] = m1[a][static_cast<Eigen::Index>(p)] * cache_->launched[n][col++];
      }
    }
    apply_transfer(u, config_.separation());
    ComplexVector vals(cache_->detection.cols());
    col = 0;
    for (std::size_t a = 0; a < aps.size(); ++a) {
      for (std::size_t p = 0; p < aps[a].pixels.size(); ++p) {
        vals[col] = m2[a][static_cast<Eigen::Index>(p)] * u.data()[aps[a].pixels[p]];
        ++col;
      }
    }
    t.col(n) = cache_->detection * vals;
  }
  return t;
}

StateVector run_setup(const GratingDesign& design, const PrepSpec& prep,
                      const SetupConfig& config) {
  return OpticalTrain(config).run(design, prep);
}

ComplexMatrix extract_transfer_matrix(const GratingDesign& design, const SetupConfig& config) {
  return OpticalTrain(config).transfer_matrix(design);
}

}  // namespace spatialq
