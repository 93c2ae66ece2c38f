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


#include "config.hpp"

#include <cstdlib>
#include <fstream>

#include "spatialq/qops.hpp"

namespace spatialq::cli {

SetupConfig RunConfig::setup_config() const {
  if (setup) {
    SetupConfig c = setup_from_json(*setup);
    if (c.layout.size() != n) throw InvalidArgument("config: setup layout size differs from n");
    return c;
  }
  return desk_setup(n, desk);
}

ComplexMatrix RunConfig::target_matrix() const {
  if (target == "qft") return qft_matrix(n);
  if (target == "identity") return ComplexMatrix::Identity(n, n);
  if (target == "shift") return shift_matrix(n, target_index % n);
  if (target == "clock") return clock_matrix(n, target_index % n);
  if (target == "file") {
    std::ifstream in(target_path);
    if (!in) throw InvalidArgument("config: cannot open target file " + target_path);
    ComplexMatrix m = matrix_from_json(nlohmann::json::parse(in));
    if (m.rows() != n || m.cols() != n) throw InvalidArgument("config: target file is not n x n");
    return m;
  }
  throw InvalidArgument("config: unknown target '" + target + "'");
}

nlohmann::json RunConfig::block(const std::string& name) const {
  if (section.is_object() && section.contains(name)) return section.at(name);
  return nlohmann::json::object();
}

RunConfig load_config(const std::string& path) {
  RunConfig c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path);
    c.section = nlohmann::json::parse(in, nullptr, true, true);
    const auto& j = c.section;
    c.n = j.value("n", c.n);
    c.seed = j.value("seed", c.seed);
    if (j.contains("desk")) {
      const auto& d = j.at("desk");
      c.desk.pitch = d.value("pitch_m", c.desk.pitch);
      c.desk.wavelength = d.value("wavelength_m", c.desk.wavelength);
      c.desk.waist_pixels = d.value("waist_px", c.desk.waist_pixels);
      c.desk.spacing_ratio = d.value("spacing_ratio", c.desk.spacing_ratio);
      c.desk.max_phase_step = d.value("max_phase_step_rad", c.desk.max_phase_step);
    }
    if (j.contains("setup")) c.setup = j.at("setup");
    if (j.contains("target")) {
      const auto& t = j.at("target");
      c.target = t.value("name", c.target);
      c.target_index = t.value("index", c.target_index);
      c.target_path = t.value("path", c.target_path);
      if (!c.target_path.empty() && std::filesystem::path(c.target_path).is_relative()) {
        c.target_path = (std::filesystem::path(path).parent_path() / c.target_path).string();
      }
    }
    if (j.contains("noise")) {
      const auto& z = j.at("noise");
      c.noise.raw_rate = z.value("raw_rate_hz", c.noise.raw_rate);
      c.noise.loss_db = z.value("loss_db", c.noise.loss_db);
      c.noise.dark_per_minute = z.value("dark_per_minute", c.noise.dark_per_minute);
      c.noise.duration = z.value("duration_s", c.noise.duration);
      c.noise.exclude_intrinsic_loss = z.value("exclude_intrinsic_loss", c.noise.exclude_intrinsic_loss);
      c.noise.analytic = z.value("noiseless", c.noise.analytic);
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
  }
  if (c.out.empty()) {
    const char* env = std::getenv("SPATIALQ_OUT");
    c.out = env && *env ? env : "out";
  }
  return c;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows ? static_cast<Eigen::Index>(re.at(0).size()) : 0;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      const double im = j.contains("im") ? j.at("im").at(i).at(k).get<double>() : 0.0;
      m(i, k) = Complex(re.at(i).at(k).get<double>(), im);
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array(), s = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      s.push_back(m(i, k).imag());
    }
    re.push_back(r);
    im.push_back(s);
  }
  return {{"re", re}, {"im", im}};
}

}  // namespace spatialq::cli
