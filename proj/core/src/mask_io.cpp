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


#include "spatialq/mask_io.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace spatialq {

namespace {

void write_pgm(const std::filesystem::path& path, int nx, int ny,
               const std::vector<unsigned char>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "P5\n" << nx << " " << ny << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw Error("failed writing " + path.string());
}

// Skips whitespace and '#' comments between PGM header tokens.
int read_token(std::istream& in) {
  int c = in.peek();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      in.get();
    }
    c = in.peek();
  }
  int v = 0;
  if (!(in >> v)) throw Error("malformed PGM header");
  return v;
}

}  // namespace

RealMatrix mask_phase(const SampledField& mask) {
  const GridSpec& g = mask.grid();
  RealMatrix phase(g.ny, g.nx);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const Complex v = mask.at(ix, iy);
      double p = std::abs(v) > 0.0 ? std::arg(v) : 0.0;
      if (p < 0.0) p += kTwoPi;
      phase(iy, ix) = p;
    }
  }
  return phase;
}

void write_phase_pgm(const SampledField& mask, const std::filesystem::path& path) {
  const RealMatrix phase = mask_phase(mask);
  std::vector<unsigned char> px(static_cast<std::size_t>(phase.size()));
  for (Eigen::Index iy = 0; iy < phase.rows(); ++iy) {
    for (Eigen::Index ix = 0; ix < phase.cols(); ++ix) {
      const long v = std::lround(phase(iy, ix) / kTwoPi * 256.0) % 256;
      px[static_cast<std::size_t>(iy * phase.cols() + ix)] = static_cast<unsigned char>(v);
    }
  }
  write_pgm(path, static_cast<int>(phase.cols()), static_cast<int>(phase.rows()), px);
}

SampledField read_phase_pgm(const std::filesystem::path& path, double pitch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw Error(path.string() + ": not a binary PGM");
  GridSpec g;
  g.nx = read_token(in);
  g.ny = read_token(in);
  g.pitch = pitch;
  if (read_token(in) != 255) throw Error(path.string() + ": expected 8-bit PGM");
  in.get();
  std::vector<unsigned char> px(g.size());
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!in) throw Error(path.string() + ": truncated image");
  SampledField f(g);
  for (std::size_t i = 0; i < px.size(); ++i) {
    f.data()[i] = std::polar(1.0, kTwoPi * px[i] / 256.0);
  }
  return f;
}

nlohmann::json phase_to_json(const SampledField& mask) {
  const GridSpec& g = mask.grid();
  const RealMatrix phase = mask_phase(mask);
  std::vector<double> flat;
  flat.reserve(g.size());
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) flat.push_back(phase(iy, ix));
  }
  return {{"nx", g.nx}, {"ny", g.ny}, {"pitch_m", g.pitch},
          {"origin_m", {g.origin.x, g.origin.y}}, {"phase_rad", flat}};
}

SampledField phase_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  g.pitch = j.at("pitch_m").get<double>();
  if (j.contains("origin_m")) {
    g.origin = {j.at("origin_m").at(0).get<double>(), j.at("origin_m").at(1).get<double>()};
  }
  const auto& ph = j.at("phase_rad");
  if (ph.size() != g.size()) throw InvalidArgument("phase array does not match nx*ny");
  SampledField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.data()[i] = std::polar(1.0, ph[i].get<double>());
  return f;
}

void write_intensity_pgm(const SampledField& field, const std::filesystem::path& path) {
  const GridSpec& g = field.grid();
  double peak = 0.0;
  for (const auto& v : field.data()) peak = std::max(peak, std::norm(v));
  std::vector<unsigned char> px(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = peak > 0.0 ? std::norm(field.data()[i]) / peak : 0.0;
    px[i] = static_cast<unsigned char>(std::lround(255.0 * s));
  }
  write_pgm(path, g.nx, g.ny, px);
  std::filesystem::path side = path;
  side.replace_extension(".json");
  std::ofstream out(side);
  if (!out) throw Error("cannot open " + side.string() + " for writing");
  out << nlohmann::json{{"image", path.filename().string()},
                        {"scaling", "linear"},
                        {"intensity_at_255", peak},
                        {"pitch_m", g.pitch},
                        {"nx", g.nx},
                        {"ny", g.ny}}
             .dump(2)
      << "\n";
}

}  // namespace spatialq
