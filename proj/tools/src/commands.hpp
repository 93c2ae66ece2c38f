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

#include "config.hpp"

namespace spatialq::cli {

struct SynthFlags {
  bool float_masks = false;
};
struct SimulateFlags {
  bool dump_planes = false;
};
struct TomoFlags {
  std::string state;
  int measurements = 0;
  bool noiseless = false;
};
struct ShorFlags {
  int register_size = 0;
  int modulus = 0;
  int base = 0;
};
struct SicFlags {
  int d = 0;
  std::string cache;
};
struct CalibrateFlags {
  double amplitude = -1.0;
};

// Each command writes its artifacts under cfg.out and returns the process
// exit code: 0 when everything was written and the command's checks held.
int cmd_synth(const RunConfig& cfg, const SynthFlags& flags);
int cmd_simulate(const RunConfig& cfg, const SimulateFlags& flags);
int cmd_qft_test(const RunConfig& cfg);
int cmd_calibrate(const RunConfig& cfg, const CalibrateFlags& flags);
int cmd_sic(const RunConfig& cfg, const SicFlags& flags);
int cmd_tomo(const RunConfig& cfg, const TomoFlags& flags);
int cmd_sweep(const RunConfig& cfg, const TomoFlags& flags);
int cmd_shor(const RunConfig& cfg, const ShorFlags& flags);
int cmd_bell(const RunConfig& cfg);

}  // namespace spatialq::cli
