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

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "spatialq/types.hpp"

namespace spatialq {

/// Uniform sampling lattice of an SLM-sized plane. Sample (ix, iy) sits at
/// origin + ((ix - nx/2) * pitch, (iy - ny/2) * pitch); storage is row-major
/// with iy as the slow index.
struct GridSpec {
  int nx = 1024;
  int ny = 1024;
  double pitch = 8e-6;
  Vec2 origin{};

  double x(int ix) const { return origin.x + (ix - nx / 2) * pitch; }
  double y(int iy) const { return origin.y + (iy - ny / 2) * pitch; }
  Vec2 position(int ix, int iy) const { return {x(ix), y(iy)}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  double x_min() const { return x(0); }
  double x_max() const { return x(nx - 1); }
  double y_min() const { return y(0); }
  double y_max() const { return y(ny - 1); }
  bool operator==(const GridSpec&) const = default;
};

/// Encoding basis: N Gaussian spots u(r - R_n) ~ exp(-|r - R_n|^2 / w0^2).
struct ModeLayout {
  std::vector<Vec2> coords;     // R_n, meters
  double waist = 0.0;           // w0, meters
  double focal = 0.0;           // f, meters
  double wavelength = 1.55e-6;  // meters
  double aperture_radius = 0.0; // R_threshold, meters

  int size() const { return static_cast<int>(coords.size()); }
  double wavenumber() const { return kTwoPi / wavelength; }
  double min_separation() const;
  double max_separation() const;
  double mean_separation() const;
  /// Largest |R_n|.
  double radius() const;
  /// |<phi_n|phi_m>| for the closest pair; 0 for a single mode.
  double max_mode_overlap() const;
  /// Throws InvalidArgument when any invariant fails.
  void validate() const;
};

/// Overlap bound the layout must satisfy for distinct modes.
inline constexpr double kMaxModeOverlap = 1e-4;

/// N spots equally spaced on a circle, R_n = radius (cos 2 pi n/N,
/// sin 2 pi n/N) for n = 0..N-1. The aperture radius defaults to 0.4 of the
/// chord between neighbours (2.5 w0 for N = 1).
ModeLayout circle_layout(int n, double radius, double waist, double focal,
                         double wavelength);

/// Parameters for a layout that fits an SLM window and keeps the splitter
/// tilts below the sampling limit.
struct DeskScale {
  double pitch = 8e-6;
  double wavelength = 1.55e-6;
  /// Spot waist in pixels. Zero picks the smallest waist whose steepest
  /// splitting tilt stays at or below max_phase_step.
  double waist_pixels = 28.0;
  /// Neighbour chord divided by w0.
  double spacing_ratio = 5.5;
  /// Largest splitter phase increment between adjacent pixels (rad).
  double max_phase_step = 2.0;
};

/// Circle layout whose focal length satisfies the confocal condition
/// f = pi w0^2 / (2 lambda): a spot of waist w0 at one SLM returns with the
/// same waist after a 2f hop with lenses of focal f on both ends.
ModeLayout desk_circle_layout(int n, const DeskScale& scale = {});

/// Sampled complex amplitude over a GridSpec.
class SampledField {
 public:
  SampledField() = default;
  explicit SampledField(const GridSpec& grid);
  SampledField(const GridSpec& grid, std::vector<Complex> data);

  const GridSpec& grid() const { return grid_; }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  Complex& at(int ix, int iy) { return data_[index(ix, iy)]; }
  const Complex& at(int ix, int iy) const { return data_[index(ix, iy)]; }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * grid_.nx + ix;
  }

  /// sum |u|^2 pitch^2
  double power() const;
  /// sum conj(this) * other * pitch^2; grids must match.
  Complex inner(const SampledField& other) const;

  SampledField& operator*=(const SampledField& mask);
  SampledField& operator+=(const SampledField& other);
  SampledField& operator*=(Complex s);

 private:
  GridSpec grid_{};
  std::vector<Complex> data_;
};

/// Unit-power sampled Gaussian of mode n (0-based). Throws InvalidArgument
/// when the grid is too coarse (w0 / pitch < 4) or leaks more than 1e-6 of
/// the spot's power past the grid edge.
SampledField mode_field(const ModeLayout& layout, int n, const GridSpec& grid);

/// sum_n a_n mode_field(n)
SampledField encode_state(const StateVector& amps, const ModeLayout& layout,
                          const GridSpec& grid);

/// a_n = <mode_field(n) | field>.
StateVector project_onto_modes(const SampledField& field,
                               const ModeLayout& layout);

/// Gram matrix <phi_n|phi_m> of the sampled modes.
ComplexMatrix mode_gram_matrix(const ModeLayout& layout, const GridSpec& grid);

nlohmann::json layout_to_json(const ModeLayout& layout);
ModeLayout layout_from_json(const nlohmann::json& j);

}  // namespace spatialq
