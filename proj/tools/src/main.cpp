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


#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  int n = 0;
  std::string target;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (default $SPATIALQ_OUT or ./out)");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("-n,--modes", c.n, "Number of spatial modes");
  sub->add_option("--target", c.target, "qft | shift | clock | identity | file");
}

spatialq::cli::RunConfig resolve(const Common& c) {
  auto cfg = c.config.empty() ? spatialq::cli::RunConfig{} : spatialq::cli::load_config(c.config);
  if (cfg.out.empty()) {
    const char* env = std::getenv("SPATIALQ_OUT");
    cfg.out = env && *env ? env : "out";
  }
  if (!c.out.empty()) cfg.out = c.out;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (c.n > 0) {
    cfg.n = c.n;
    cfg.setup.reset();
  }
  if (!c.target.empty()) cfg.target = c.target;
  cfg.noise.seed = cfg.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace spatialq::cli;
  CLI::App app{"Spatial-mode linear optics and tomography toolkit"};
  app.require_subcommand(1);

  Common common;
  SynthFlags synth;
  SimulateFlags sim;
  CalibrateFlags cal;
  SicFlags sic;
  TomoFlags tomo;
  ShorFlags shor;

  auto* c_synth = app.add_subcommand("synth", "Design the three SLM masks for a target");
  add_common(c_synth, common);
  c_synth->add_flag("--float", synth.float_masks, "Also write unquantized phases as JSON");

  auto* c_sim = app.add_subcommand("simulate", "Propagate through the optical train");
  add_common(c_sim, common);
  c_sim->add_flag("--dump-planes", sim.dump_planes, "Write intensity images of each plane");

  auto* c_qft = app.add_subcommand("qft-test", "QFT applied to the Fourier basis");
  add_common(c_qft, common);

  auto* c_cal = app.add_subcommand("calibrate", "Recover and compensate phase errors");
  add_common(c_cal, common);
  c_cal->add_option("--amplitude", cal.amplitude, "Injected phase error amplitude (rad)");

  auto* c_sic = app.add_subcommand("sic", "Find or load a SIC fiducial");
  add_common(c_sic, common);
  c_sic->add_option("-d,--dim", sic.d, "Dimension (default: n)");
  c_sic->add_option("--cache", sic.cache, "Fiducial cache directory");

  auto* c_tomo = app.add_subcommand("tomo", "Compressed-sensing state tomography");
  auto* c_sweep = app.add_subcommand("sweep", "Tomography versus sampling ratio");
  for (auto* s : {c_tomo, c_sweep}) {
    add_common(s, common);
    s->add_option("--state", tomo.state, "phi:k | omega:k | random");
    s->add_flag("--noiseless", tomo.noiseless, "Exact probabilities");
  }
  c_tomo->add_option("-m,--measurements", tomo.measurements, "Number of POVM elements used");

  auto* c_shor = app.add_subcommand("shor", "Compiled order finding");
  add_common(c_shor, common);
  c_shor->add_option("--register", shor.register_size, "Register dimension");
  c_shor->add_option("--modulus", shor.modulus, "Number to factor");
  c_shor->add_option("--base", shor.base, "Base a");

  auto* c_bell = app.add_subcommand("bell", "Check the high-dimensional Bell basis");
  add_common(c_bell, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(common);
    if (c_synth->parsed()) return cmd_synth(cfg, synth);
    if (c_sim->parsed()) return cmd_simulate(cfg, sim);
    if (c_qft->parsed()) return cmd_qft_test(cfg);
    if (c_cal->parsed()) return cmd_calibrate(cfg, cal);
    if (c_sic->parsed()) return cmd_sic(cfg, sic);
    if (c_tomo->parsed()) return cmd_tomo(cfg, tomo);
    if (c_sweep->parsed()) return cmd_sweep(cfg, tomo);
    if (c_shor->parsed()) return cmd_shor(cfg, shor);
    if (c_bell->parsed()) return cmd_bell(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
