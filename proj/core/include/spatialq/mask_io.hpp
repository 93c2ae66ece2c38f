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

#include <filesystem>

#include <nlohmann/json.hpp>

#include "spatialq/modes.hpp"

namespace spatialq {

/// Phase of every sample wrapped to [0, 2pi); zero-amplitude samples map to 0.
RealMatrix mask_phase(const SampledField& mask);

/// Binary PGM (P5) with pixel value v standing for phase 2 pi v / 256.
/// Row 0 of the image is grid row 0.
void write_phase_pgm(const SampledField& mask, const std::filesystem::path& path);

/// Unit-magnitude field from an 8-bit phase image.
SampledField read_phase_pgm(const std::filesystem::path& path, double pitch);

nlohmann::json phase_to_json(const SampledField& mask);
SampledField phase_from_json(const nlohmann::json& j);

/// |u|^2 scaled linearly so the brightest sample is 255; the scale factor is
/// written next to the image as <stem>.json.
void write_intensity_pgm(const SampledField& field, const std::filesystem::path& path);

}  // namespace spatialq
