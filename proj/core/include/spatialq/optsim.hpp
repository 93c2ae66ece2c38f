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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spatialq/modes.hpp"
#include "spatialq/synthesis.hpp"
#include "spatialq/types.hpp"

namespace spatialq {

struct SetupConfig {
  ModeLayout layout;
  GridSpec grid{};
  /// Blazed carrier period in pixels.
  int grating_period = 4;
  bool use_blazed_carrier = false;
  /// SLM1 to SLM2 distance; 0 means the confocal value 2f.
  double slm_separation = 0.0;
  /// 0 means layout.aperture_radius.
  double pinhole_radius = 0.0;
  /// Aperture radius on SLM0; 0 means layout.aperture_radius.
  double slm0_aperture_radius = 0.0;
  /// Power transmitted by each SLM.
  double modulation_efficiency = 1.0;
  /// Path-length compensations theta_mn (SLM1) and delta_m (SLM1).
  bool compensate_paths = true;
  /// Unknown constant phase errors eps_mn added to the implemented matrix.
  std::optional<RealMatrix> phase_error;

  double separation() const { return slm_separation > 0.0 ? slm_separation : 2.0 * layout.focal; }
  double pinhole() const { return pinhole_radius > 0.0 ? pinhole_radius : layout.aperture_radius; }
  double slm0_aperture() const {
    return slm0_aperture_radius > 0.0 ? slm0_aperture_radius : layout.aperture_radius;
  }
  /// Largest grid pitch that keeps every designed field of the train (launch
  /// tilts, routing tilts, lens curvature, spot bandwidth) below 0.9 Nyquist.
  double band_limit_pitch() const;
  /// Throws InvalidArgument on inconsistent parameters and AliasingError
  /// when the grid is too coarse for the geometry.
  void validate() const;
};

nlohmann::json setup_to_json(const SetupConfig& c);
/// Missing keys keep their defaults; "layout" is required.
SetupConfig setup_from_json(const nlohmann::json& j);

/// Desk-scale setup for an N-mode circle on the default 1024^2 grid.
SetupConfig desk_setup(int n, const DeskScale& scale = {});

struct PrepSpec {
  StateVector target_state;
  /// Per-mode weights xi_n; empty means all ones.
  ComplexVector xi;

  /// k_n = k R_n / 2f
  static Vec2 launch_tilt(const ModeLayout& layout, int n);
};

/// Paraxial angular-spectrum propagation on the field's own grid.
SampledField fresnel_propagate(const SampledField& field, double distance, double wavelength);

SampledField slm0_mask(const PrepSpec& prep, const SetupConfig& config);
SampledField slm1_mask(const GratingDesign& design, const SetupConfig& config);
SampledField slm2_mask(const GratingDesign& design, const SetupConfig& config);

/// Optimizes xi so SLM0 launches the requested amplitudes.
PrepSpec optimize_prep(const StateVector& target, const SetupConfig& config,
                       const OptimizeOptions& opts = {});

/// Tunes mu and nu against the physical masks: Gaussian-weighted
/// coefficients and the path compensations built into SLM1.
GratingDesign optimize_for_setup(const GratingDesign& design, const SetupConfig& config,
                                 const OptimizeOptions& opts = {});

/// Fields at named planes of one run, for inspection.
struct PlaneFields {
  std::vector<std::pair<std::string, SampledField>> planes;
};

/// Full two-SLM train with cached propagators and detection modes.
class OpticalTrain {
 public:
  explicit OpticalTrain(SetupConfig config);

  const SetupConfig& config() const { return config_; }

  /// Field right after SLM0 for a prepared state.
  SampledField launch(const PrepSpec& prep) const;
  /// Amplitudes of the N output ports for a field leaving SLM0.
  StateVector propagate(const GratingDesign& design, const SampledField& after_slm0,
                        PlaneFields* dump = nullptr) const;
  StateVector run(const GratingDesign& design, const PrepSpec& prep) const;
  /// Columns are the port amplitudes for single-mode inputs e_n.
  ComplexMatrix transfer_matrix(const GratingDesign& design) const;
  /// Field leaving SLM0 when the launch is an ideal tilted copy of the input
  /// beam for every mode (no phase-only clipping).
  SampledField ideal_launch(const StateVector& amps) const;

 private:
  SampledField input_beam() const;
  void apply_transfer(SampledField& f, double distance) const;
  const std::vector<Complex>& transfer(double distance) const;
  StateVector detect(const SampledField& at_slm2_after_mask) const;

  SetupConfig config_;
  std::shared_ptr<struct TrainCache> cache_;
};

StateVector run_setup(const GratingDesign& design, const PrepSpec& prep,
                      const SetupConfig& config);
ComplexMatrix extract_transfer_matrix(const GratingDesign& design, const SetupConfig& config);

}  // namespace spatialq
