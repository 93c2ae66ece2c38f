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
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "spatialq/modes.hpp"
#include "spatialq/optsim.hpp"
#include "spatialq/tomo.hpp"
#include "spatialq/types.hpp"

namespace spatialq::cli {

/// Experiment manifest. Every section is optional in the file; command-line
/// flags are applied on top of it.
struct RunConfig {
  int n = 15;
  DeskScale desk{};
  /// Full optical setup; derived from n and desk when absent.
  std::optional<nlohmann::json> setup;
  /// qft | shift | clock | identity | file
  std::string target = "qft";
  int target_index = 1;
  std::string target_path;
  NoiseModel noise{};
  std::uint64_t seed = 1;
  std::filesystem::path out;
  nlohmann::json section;  // the raw file, for command-specific blocks

  SetupConfig setup_config() const;
  ComplexMatrix target_matrix() const;
  /// Command-specific block, or an empty object.
  nlohmann::json block(const std::string& name) const;
};

/// Reads `path` when non-empty; `out` falls back to $SPATIALQ_OUT, then "out".
RunConfig load_config(const std::string& path);

ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

}  // namespace spatialq::cli
