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


#include "spatialq/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spatialq {

namespace {

// Fraction of a continuous unit Gaussian |u|^2 ~ exp(-2 r^2 / w0^2) that
// falls outside the sampled window [lo, hi] along one axis.
double axis_capture(double centre, double lo, double hi, double w0) {
  const double s = std::sqrt(2.0) / w0;
  return 0.5 * (std::erf(s * (hi - centre)) - std::erf(s * (lo - centre)));
}

// Beyond this many waists the amplitude is below double precision.
constexpr double kSupportWaists = 6.5;

}  // namespace

double ModeLayout::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      best = std::min(best, (coords[i] - coords[j]).norm());
    }
  }
  return best;
}

double ModeLayout::max_separation() const {
  double best = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      best = std::max(best, (coords[i] - coords[j]).norm());
    }
  }
  return best;
}

double ModeLayout::mean_separation() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      sum += (coords[i] - coords[j]).norm();
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

double ModeLayout::radius() const {
  double r = 0.0;
  for (const auto& c : coords) r = std::max(r, c.norm());
  return r;
}

double ModeLayout::max_mode_overlap() const {
  if (coords.size() < 2) return 0.0;
  const double d = min_separation();
  return std::exp(-d * d / (2.0 * waist * waist));
}

void ModeLayout::validate() const {
  if (coords.empty()) throw InvalidArgument("layout: no modes");
  if (!(waist > 0.0)) throw InvalidArgument("layout: waist must be positive");
  if (!(focal > 0.0)) throw InvalidArgument("layout: focal length must be positive");
  if (!(wavelength > 0.0)) throw InvalidArgument("layout: wavelength must be positive");
  if (!(aperture_radius > 0.0)) {
    throw InvalidArgument("layout: aperture radius must be positive");
  }
  if (coords.size() < 2) return;
  const double dmin = min_separation();
  if (!(dmin > 0.0)) throw InvalidArgument("layout: coincident mode coordinates");
  if (max_mode_overlap() >= kMaxModeOverlap) {
    std::ostringstream os;
    os << "layout: modes not orthogonal (overlap " << max_mode_overlap()
       << "); waist too large for the spacing";
    throw InvalidArgument(os.str());
  }
  if (aperture_radius >= 0.5 * dmin) {
    throw InvalidArgument("layout: apertures overlap");
  }
}

ModeLayout circle_layout(int n, double radius, double waist, double focal,
                         double wavelength) {
  if (n < 1) throw InvalidArgument("circle_layout: N must be >= 1");
  if (!(radius > 0.0) || !(waist > 0.0)) {
    throw InvalidArgument("circle_layout: radius and waist must be positive");
  }
  ModeLayout l;
  l.waist = waist;
  l.focal = focal;
  l.wavelength = wavelength;
  l.coords.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = kTwoPi * i / n;
    l.coords.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  if (n == 1) {
    l.aperture_radius = 2.5 * waist;
  } else {
    const double chord = 2.0 * radius * std::sin(kPi / n);
    l.aperture_radius = 0.4 * chord;
  }
  l.validate();
  return l;
}

ModeLayout desk_circle_layout(int n, const DeskScale& scale) {
  if (n < 1) throw InvalidArgument("desk_circle_layout: N must be >= 1");
  const double k = kTwoPi / scale.wavelength;
  const double s = n > 1 ? std::sin(kPi / n) : 1.0;
  double w0 = scale.waist_pixels * scale.pitch;
  if (!(scale.waist_pixels > 0.0)) {
    // Steepest tilt between diametric spots is 2 * ratio * pitch / (s * w0)
    // radians per pixel once f is tied to the waist.
    w0 = 2.0 * scale.spacing_ratio * scale.pitch / (s * scale.max_phase_step);
    w0 = std::max(w0, 4.0 * scale.pitch);
  }
  const double chord = scale.spacing_ratio * w0;
  const double radius = n > 1 ? chord / (2.0 * s) : chord;
  // Confocal relay: a waist-w0 spot refocused over 2f keeps its size.
  const double focal = k * w0 * w0 / 4.0;
  return circle_layout(n, radius, w0, focal, scale.wavelength);
}

SampledField::SampledField(const GridSpec& grid)
    : grid_(grid), data_(grid.size(), Complex(0.0, 0.0)) {}

SampledField::SampledField(const GridSpec& grid, std::vector<Complex> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) {
    throw InvalidArgument("SampledField: data size does not match grid");
  }
}

double SampledField::power() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return s * grid_.pitch * grid_.pitch;
}

Complex SampledField::inner(const SampledField& other) const {
  if (!(grid_ == other.grid_)) throw InvalidArgument("inner: grid mismatch");
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    s += std::conj(data_[i]) * other.data_[i];
  }
  return s * (grid_.pitch * grid_.pitch);
}

SampledField& SampledField::operator*=(const SampledField& mask) {
  if (!(grid_ == mask.grid_)) throw InvalidArgument("multiply: grid mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= mask.data_[i];
  return *this;
}

SampledField& SampledField::operator+=(const SampledField& other) {
  if (!(grid_ == other.grid_)) throw InvalidArgument("add: grid mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SampledField& SampledField::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

SampledField mode_field(const ModeLayout& layout, int n, const GridSpec& grid) {
  if (n < 0 || n >= layout.size()) throw InvalidArgument("mode_field: index out of range");
  const double w0 = layout.waist;
  if (w0 / grid.pitch < 4.0) {
    throw InvalidArgument("mode_field: waist must span at least 4 pixels");
  }
  const Vec2 c = layout.coords[n];
  const double h = 0.5 * grid.pitch;
  const double captured =
      axis_capture(c.x, grid.x_min() - h, grid.x_max() + h, w0) *
      axis_capture(c.y, grid.y_min() - h, grid.y_max() + h, w0);
  if (1.0 - captured > 1e-6) {
    throw InvalidArgument("mode_field: spot leaks outside the grid");
  }

  SampledField u(grid);
  const double reach = kSupportWaists * w0;
  const int ix0 = std::max(0, static_cast<int>(std::floor((c.x - reach - grid.origin.x) / grid.pitch)) + grid.nx / 2);
  const int ix1 = std::min(grid.nx - 1, static_cast<int>(std::ceil((c.x + reach - grid.origin.x) / grid.pitch)) + grid.nx / 2);
  const int iy0 = std::max(0, static_cast<int>(std::floor((c.y - reach - grid.origin.y) / grid.pitch)) + grid.ny / 2);
  const int iy1 = std::min(grid.ny - 1, static_cast<int>(std::ceil((c.y + reach - grid.origin.y) / grid.pitch)) + grid.ny / 2);
  double sum = 0.0;
  for (int iy = iy0; iy <= iy1; ++iy) {
    const double dy = grid.y(iy) - c.y;
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double dx = grid.x(ix) - c.x;
      const double v = std::exp(-(dx * dx + dy * dy) / (w0 * w0));
      u.at(ix, iy) = v;
      sum += v * v;
    }
  }
  u *= Complex(1.0 / (std::sqrt(sum) * grid.pitch), 0.0);
  return u;
}

SampledField encode_state(const StateVector& amps, const ModeLayout& layout,
                          const GridSpec& grid) {
  if (amps.size() != layout.size()) throw InvalidArgument("encode_state: size mismatch");
  SampledField out(grid);
  for (int n = 0; n < layout.size(); ++n) {
    if (amps[n] == Complex(0.0, 0.0)) continue;
    SampledField u = mode_field(layout, n, grid);
    u *= amps[n];
    out += u;
  }
  return out;
}

StateVector project_onto_modes(const SampledField& field,
                               const ModeLayout& layout) {
  StateVector a(layout.size());
  for (int n = 0; n < layout.size(); ++n) {
    a[n] = mode_field(layout, n, field.grid()).inner(field);
  }
  return a;
}

ComplexMatrix mode_gram_matrix(const ModeLayout& layout, const GridSpec& grid) {
  std::vector<SampledField> u;
  u.reserve(layout.size());
  for (int n = 0; n < layout.size(); ++n) u.push_back(mode_field(layout, n, grid));
  ComplexMatrix g(layout.size(), layout.size());
  for (int i = 0; i < layout.size(); ++i) {
    for (int j = 0; j < layout.size(); ++j) g(i, j) = u[i].inner(u[j]);
  }
  return g;
}

nlohmann::json layout_to_json(const ModeLayout& layout) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& c : layout.coords) coords.push_back({c.x, c.y});
  return {{"N", layout.size()},
          {"radius_m", layout.radius()},
          {"waist_m", layout.waist},
          {"focal_m", layout.focal},
          {"wavelength_m", layout.wavelength},
          {"aperture_radius_m", layout.aperture_radius},
          {"coords", coords}};
}

ModeLayout layout_from_json(const nlohmann::json& j) {
  ModeLayout l;
  l.waist = j.at("waist_m").get<double>();
  l.focal = j.at("focal_m").get<double>();
  l.wavelength = j.value("wavelength_m", 1.55e-6);
  if (j.contains("coords")) {
    for (const auto& c : j.at("coords")) {
      l.coords.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    }
    if (j.contains("N") && j.at("N").get<int>() != l.size()) {
      throw InvalidArgument("layout: N does not match coords");
    }
  } else {
    const int n = j.at("N").get<int>();
    const double r = j.at("radius_m").get<double>();
    ModeLayout c = circle_layout(n, r, l.waist, l.focal, l.wavelength);
    l.coords = c.coords;
    l.aperture_radius = c.aperture_radius;
  }
  if (j.contains("aperture_radius_m")) {
    l.aperture_radius = j.at("aperture_radius_m").get<double>();
  } else if (l.aperture_radius == 0.0 && l.size() > 1) {
    l.aperture_radius = 0.4 * l.min_separation();
  } else if (l.aperture_radius == 0.0) {
    l.aperture_radius = 2.5 * l.waist;
  }
  l.validate();
  return l;
}

}  // namespace spatialq
