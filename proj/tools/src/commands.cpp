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


#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>

#include "spatialq/calib.hpp"
#include "spatialq/linalg.hpp"
#include "spatialq/mask_io.hpp"
#include "spatialq/qops.hpp"
#include "spatialq/synthesis.hpp"

namespace spatialq::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  return cfg.out;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << j.dump(2) << '\n';
  std::cout << "wrote " << p.string() << '\n';
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << std::setprecision(10);
  std::cout << "wrote " << p.string() << '\n';
  return out;
}

void write_matrix_csv(const fs::path& p, const RealMatrix& m) {
  auto out = open_csv(p);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

std::string data_dir(const nlohmann::json& block, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (block.contains("cache")) return block.at("cache").get<std::string>();
  const char* env = std::getenv("SPATIALQ_DATA");
  return env && *env ? env : "data";
}

PovmSet load_povm(int d, const std::string& cache) {
  SicSearchOptions opts;
  return sic_povm(d, load_or_find_sic_fiducial(d, cache, opts));
}

StateVector parse_state(const std::string& label, int n, std::uint64_t seed) {
  const auto colon = label.find(':');
  const std::string kind = label.substr(0, colon);
  const int idx = colon == std::string::npos ? 0 : std::stoi(label.substr(colon + 1));
  if (kind == "random") {
    auto rng = split_rng(seed, 0x5eed);
    return random_state(n, rng);
  }
  if (idx < 0 || idx >= n) throw InvalidArgument("state index out of range: " + label);
  if (kind == "phi") {
    StateVector e = StateVector::Zero(n);
    e[idx] = 1.0;
    return e;
  }
  if (kind == "omega") return fourier_basis(n).col(idx);
  throw InvalidArgument("unknown state '" + label + "' (phi:k, omega:k or random)");
}

GratingDesign design_for(const ComplexMatrix& t, const SetupConfig& setup) {
  return optimize_for_setup(GratingDesign::from_target(t, setup.layout, Decomposition::Balanced), setup);
}

// Fraction of detected power in the designated port for each Fourier input.
RealVector port_fractions(const OpticalTrain& train, const GratingDesign& design) {
  const int n = design.size();
  const ComplexMatrix om = fourier_basis(n);
  RealVector frac(n);
  for (int k = 0; k < n; ++k) {
    const StateVector out = train.run(design, optimize_prep(om.col(k), train.config()));
    frac[k] = std::norm(out[k]) / out.squaredNorm();
  }
  return frac;
}

}  // namespace

int cmd_synth(const RunConfig& cfg, const SynthFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const SetupConfig setup = cfg.setup_config();
  const ComplexMatrix t = cfg.target_matrix();

  SynthesisOptions so;
  so.decomposition = Decomposition::Balanced;
  so.weighting = Weighting::Mode;
  so.pitch = setup.grid.pitch;
  const auto [design, report] = synthesize(t, setup.layout, so);

  std::vector<SampledField> splitters;
  for (int n = 0; n < design.size(); ++n) {
    splitters.push_back(phase_only_grating(design, Side::Splitter, n, setup.grid));
  }
  const ComplexMatrix a_back = extract_matrix(splitters, design, Side::Splitter, Weighting::Mode);

  const GratingDesign mask_design = design_for(t, setup);
  StateVector uniform = StateVector::Ones(cfg.n) / std::sqrt(static_cast<double>(cfg.n));
  const SampledField m0 = slm0_mask(optimize_prep(uniform, setup), setup);
  const SampledField m1 = slm1_mask(mask_design, setup);
  const SampledField m2 = slm2_mask(mask_design, setup);
  for (const auto& [name, mask] : {std::pair{"slm0", &m0}, {"slm1", &m1}, {"slm2", &m2}}) {
    write_phase_pgm(*mask, dir / (std::string(name) + ".pgm"));
    std::cout << "wrote " << (dir / (std::string(name) + ".pgm")).string() << '\n';
    if (flags.float_masks) write_json(dir / (std::string(name) + "_phase.json"), phase_to_json(*mask));
  }

  nlohmann::json j = report_to_json(report);
  j["target"] = cfg.target;
  j["n"] = cfg.n;
  j["reextracted_fidelity_A"] = matrix_fidelity(a_back, normalized_factor(design, Side::Splitter));
  j["setup"] = setup_to_json(setup);
  write_json(dir / "synth_report.json", j);
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const SimulateFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const SetupConfig setup = cfg.setup_config();
  const ComplexMatrix t = cfg.target_matrix();
  const OpticalTrain train(setup);
  const GratingDesign design = design_for(t, setup);
  const ComplexMatrix t_exp = train.transfer_matrix(design);
  write_json(dir / "transfer_matrix.json", matrix_to_json(t_exp));
  if (flags.dump_planes) {
    PlaneFields planes;
    StateVector e0 = StateVector::Zero(cfg.n);
    e0[0] = 1.0;
    train.propagate(design, train.launch(PrepSpec{e0, {}}), &planes);
    for (const auto& [name, field] : planes.planes) {
      write_intensity_pgm(field, dir / ("plane_" + name + ".pgm"));
      std::cout << "wrote " << (dir / ("plane_" + name + ".pgm")).string() << '\n';
    }
  }
  write_json(dir / "simulate_report.json",
             {{"target", cfg.target},
              {"n", cfg.n},
              {"fidelity", matrix_fidelity(t_exp, t)},
              {"efficiency", t_exp.squaredNorm() / t.squaredNorm()}});
  return 0;
}

int cmd_qft_test(const RunConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const int n = cfg.n;
  const SetupConfig setup = cfg.setup_config();
  const ComplexMatrix om = fourier_basis(n);
  const ComplexMatrix f = qft_matrix(n);
  ComplexMatrix x;
  if (n == 1) {
    x = ComplexMatrix::Identity(1, 1);
  } else {
    const OpticalTrain train(setup);
    x = train.transfer_matrix(design_for(f, setup)) * om;
  }
  RealMatrix p = x.cwiseAbs2();
  for (Eigen::Index k = 0; k < p.cols(); ++k) p.col(k) /= p.col(k).sum();
  write_matrix_csv(dir / "qft_probabilities.csv", p);

  auto amplitude_fidelity = [n](const RealMatrix& c) {
    return std::pow(c.diagonal().cwiseSqrt().sum(), 2) / (n * c.sum());
  };
  NoiseModel noise = cfg.noise;
  noise.seed = cfg.seed;
  noise.duration = cfg.block("qft").value("duration_s", 120.0);
  const RealMatrix counts = simulate_port_counts(p, noise, n);
  write_matrix_csv(dir / "qft_counts.csv", counts);
  write_json(dir / "qft_report.json",
             {{"n", n},
              {"fidelity_noiseless", matrix_fidelity(x, ComplexMatrix::Identity(n, n))},
              {"fidelity_noiseless_intensity", amplitude_fidelity(p)},
              {"fidelity_counts", amplitude_fidelity(counts)},
              {"duration_s", noise.duration},
              {"total_counts", counts.sum()}});
  return 0;
}

int cmd_calibrate(const RunConfig& cfg, const CalibrateFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const int n = cfg.n;
  const double amp = flags.amplitude >= 0.0 ? flags.amplitude
                                             : cfg.block("calibrate").value("amplitude_rad", kPi);
  auto rng = split_rng(cfg.seed, 0xca1);
  const PhaseErrorMap injected = PhaseErrorMap::random(n, amp, rng);
  SetupConfig setup = cfg.setup_config();
  setup.phase_error = injected.eps;
  const OpticalTrain train(setup);
  const ComplexMatrix f = qft_matrix(n);

  const GratingDesign raw = design_for(f, setup);
  const ComplexMatrix t_real = train.transfer_matrix(raw);
  const RealMatrix mags = estimate_magnitudes(basis_intensities(t_real));
  const PhaseErrorMap recovered = phase_error_from(f, recover_phases(probe_intensities(t_real), mags));
  const GratingDesign fixed = design_for(compensate(f, recovered), setup);

  const RealVector before = port_fractions(train, raw);
  const RealVector after = port_fractions(train, fixed);
  write_json(dir / "eps_injected.json", phase_map_to_json(injected));
  write_json(dir / "eps_recovered.json", phase_map_to_json(recovered));
  const bool ok = after.minCoeff() > 0.9;
  write_json(dir / "calibrate_report.json",
             {{"n", n},
              {"probes", 2 * (n - 1)},
              {"phase_map_distance_rad", phase_map_distance(recovered, injected)},
              {"port_fraction_min_before", before.minCoeff()},
              {"port_fraction_min_after", after.minCoeff()},
              {"port_fraction_mean_after", after.mean()},
              {"single_bright_port", ok}});
  return ok ? 0 : 1;
}

int cmd_sic(const RunConfig& cfg, const SicFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const auto block = cfg.block("sic");
  const int d = flags.d > 0 ? flags.d : block.value("d", cfg.n);
  SicSearchOptions opts;
  opts.seed = cfg.seed;
  opts.restarts = block.value("restarts", opts.restarts);
  const ComplexVector psi = load_or_find_sic_fiducial(d, data_dir(block, flags.cache), opts);
  const PovmSet povm = sic_povm(d, psi);
  const double dev = sic_deviation(psi);
  const double completeness = povm.completeness_residual();
  write_json(dir / "sic_fiducial.json", {{"d", d}, {"fiducial", complex_vector_to_json(psi)}});
  const bool ok = dev < 1e-5 && completeness < 1e-10;
  write_json(dir / "sic_report.json", {{"d", d},
                                       {"elements", povm.size()},
                                       {"sic_deviation", dev},
                                       {"completeness_residual", completeness},
                                       {"valid", ok}});
  return ok ? 0 : 1;
}

int cmd_tomo(const RunConfig& cfg, const TomoFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const auto block = cfg.block("tomo");
  const int d = cfg.n;
  const std::string label = !flags.state.empty() ? flags.state : block.value("state", std::string("phi:3"));
  const int m = flags.measurements > 0 ? flags.measurements : block.value("measurements", 100);
  const PovmSet povm = load_povm(d, data_dir(block, ""));
  if (m < d || m > static_cast<int>(povm.size())) throw InvalidArgument("tomo: measurements out of range");
  const DensityMatrix truth = DensityMatrix::pure(parse_state(label, d, cfg.seed));

  NoiseModel noise = flags.noiseless ? NoiseModel::noiseless() : cfg.noise;
  noise.seed = cfg.seed;
  const auto records = simulate_counts(truth, povm.states, noise);
  {
    auto out = open_csv(dir / "tomo_counts.csv");
    write_counts_csv(out, records);
  }
  const RealVector p_all = estimate_probabilities(records, !noise.analytic);
  const RealVector q_all = projection_probabilities(truth, povm.states);

  std::vector<int> idx(povm.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto rng = split_rng(cfg.seed, 0x70);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(m));
  ProjectorList sub;
  RealVector p(m);
  for (int i = 0; i < m; ++i) {
    sub.push_back(povm.states[static_cast<std::size_t>(idx[i])]);
    p[i] = p_all[idx[i]];
  }
  const DensityMatrix est = cs_reconstruct(sub, p);
  est.validate(1e-10, 1e-8, 1e-8);
  write_json(dir / "tomo_density.json", density_to_json(est));
  write_json(dir / "tomo_report.json", {{"state", label},
                                        {"d", d},
                                        {"measurements", m},
                                        {"subset", idx},
                                        {"noiseless", noise.analytic},
                                        {"statistical_fidelity", statistical_fidelity(p_all, q_all)},
                                        {"dm_fidelity", dm_fidelity(est, truth)},
                                        {"trace_distance", trace_distance(est, truth)},
                                        {"purity", est.purity()}});
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const TomoFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const auto block = cfg.block("sweep");
  const int d = cfg.n;
  const std::string label = !flags.state.empty() ? flags.state : block.value("state", std::string("phi:3"));
  const PovmSet povm = load_povm(d, data_dir(block, ""));
  SweepOptions so;
  so.ratios = block.value("ratios", std::vector<double>{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
  so.trials = block.value("trials", 5);
  so.seed = cfg.seed;
  so.noise = flags.noiseless ? NoiseModel::noiseless() : cfg.noise;
  const SweepResult res = sampling_sweep(parse_state(label, d, cfg.seed), povm.states, so);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  {
    auto out = open_csv(dir / "sweep.csv");
    write_sweep_csv(out, res.rows);
  }
  std::vector<double> ratio, fid;
  bool bound = true;
  for (const auto& r : res.rows) {
    ratio.push_back(r.ratio);
    fid.push_back(r.fidelity_mean);
    bound = bound && r.trace_distance_mean <= std::sqrt(std::max(0.0, 1.0 - r.fidelity_mean)) + 0.02;
  }
  nlohmann::json j = {{"state", label}, {"rows", res.rows.size()}, {"trace_distance_bound_holds", bound}};
  if (res.rows.size() >= 2) {
    j["spearman_fidelity_vs_ratio"] = spearman(ratio, fid);
    if (!so.noise.analytic) j["error_slope_loglog"] = error_slope(res.rows);
  }
  write_json(dir / "sweep_report.json", j);
  return 0;
}

int cmd_shor(const RunConfig& cfg, const ShorFlags& flags) {
  const fs::path dir = prepare_dir(cfg);
  const auto block = cfg.block("shor");
  const int reg = flags.register_size > 0 ? flags.register_size : block.value("register", 16);
  const int mod = flags.modulus > 0 ? flags.modulus : block.value("modulus", 15);
  const int base = flags.base > 0 ? flags.base : block.value("base", 2);
  const OrderFindingResult r = order_finding_demo(reg, mod, base);
  {
    auto out = open_csv(dir / "shor_distribution.csv");
    out << "y,f,p\n";
    for (Eigen::Index y = 0; y < r.joint.rows(); ++y) {
      for (Eigen::Index v = 0; v < r.joint.cols(); ++v) {
        if (r.joint(y, v) > 0.0) out << y << ',' << v << ',' << r.joint(y, v) << '\n';
      }
    }
  }
  std::vector<int> peaks;
  for (Eigen::Index y = 0; y < r.marginal.size(); ++y) {
    if (r.marginal[y] > 1e-12) peaks.push_back(static_cast<int>(y));
  }
  const int truth = classical_order(base, mod);
  write_json(dir / "shor_report.json", {{"register", reg},
                                        {"modulus", mod},
                                        {"base", base},
                                        {"period", r.period},
                                        {"classical_period", truth},
                                        {"factors", r.factors},
                                        {"peaks", peaks}});
  return r.period == truth ? 0 : 1;
}

int cmd_bell(const RunConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const int n = cfg.n;
  std::vector<ComplexVector> states;
  double reach = 0.0;
  const BipartiteState root = bell_state(n, 0, 0);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      const BipartiteState s = bell_state(n, m, k);
      states.push_back(s.vector());
      const BipartiteState moved = apply_local(id, shift_matrix(n, m) * clock_matrix(n, k), root);
      reach = std::max(reach, std::abs(std::abs(s.inner(moved)) - 1.0));
    }
  }
  ComplexMatrix v(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = states[i];
  const ComplexMatrix gram = v.adjoint() * v;
  const double ortho = (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  const bool ok = ortho < 1e-10 && reach < 1e-10;
  write_json(dir / "bell_report.json", {{"n", n},
                                        {"states", states.size()},
                                        {"max_gram_deviation", ortho},
                                        {"max_reachability_deviation", reach},
                                        {"orthonormal_basis", ok}});
  return ok ? 0 : 1;
}

}  // namespace spatialq::cli
