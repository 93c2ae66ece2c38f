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


#include "spatialq/calib.hpp"

#include <cmath>

namespace spatialq {

namespace {

double wrap(double x) { return std::remainder(x, kTwoPi); }

void check_shape(const ComplexMatrix& t, const PhaseErrorMap& e, const char* who) {
  if (t.rows() != e.eps.rows() || t.cols() != e.eps.cols()) {
    throw InvalidArgument(std::string(who) + ": shape mismatch");
  }
}

}  // namespace

PhaseErrorMap PhaseErrorMap::random(int n, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  PhaseErrorMap e = zero(n);
  for (Eigen::Index j = 0; j < e.eps.cols(); ++j) {
    for (Eigen::Index i = 0; i < e.eps.rows(); ++i) e.eps(i, j) = u(rng);
  }
  return e;
}

nlohmann::json phase_map_to_json(const PhaseErrorMap& e) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.eps.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < e.eps.cols(); ++j) row.push_back(e.eps(i, j));
    rows.push_back(row);
  }
  return {{"eps_rad", rows}};
}

PhaseErrorMap phase_map_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("eps_rad");
  const auto n = static_cast<Eigen::Index>(rows.size());
  PhaseErrorMap e{RealMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows.at(i).size()) != n) {
      throw InvalidArgument("phase map must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) e.eps(i, k) = rows.at(i).at(k).get<double>();
  }
  return e;
}

ComplexMatrix apply_phase_error(const ComplexMatrix& t, const PhaseErrorMap& err) {
  check_shape(t, err, "apply_phase_error");
  ComplexMatrix out = t;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) out(i, j) *= std::polar(1.0, err.eps(i, j));
  }
  return out;
}

ComplexMatrix compensate(const ComplexMatrix& target, const PhaseErrorMap& err) {
  return apply_phase_error(target, PhaseErrorMap{-err.eps});
}

std::vector<StateVector> probe_vectors(int n) {
  if (n < 2) throw InvalidArgument("probe_vectors: need N >= 2");
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(2 * (n - 1)));
  for (int j = 1; j < n; ++j) {
    StateVector c = StateVector::Zero(n);
    c[0] = 1.0;
    c[j] = 1.0;
    StateVector s = c;
    s[0] = Complex(0.0, 1.0);
    out.push_back(c);
    out.push_back(s);
  }
  return out;
}

std::vector<RealVector> probe_intensities(const ComplexMatrix& t) {
  std::vector<RealVector> out;
  for (const auto& v : probe_vectors(static_cast<int>(t.cols()))) {
    out.push_back((t * v).cwiseAbs2());
  }
  return out;
}

std::vector<RealVector> basis_intensities(const ComplexMatrix& t) {
  std::vector<RealVector> out;
  for (Eigen::Index j = 0; j < t.cols(); ++j) out.push_back(t.col(j).cwiseAbs2());
  return out;
}

RealMatrix estimate_magnitudes(const std::vector<RealVector>& basis) {
  if (basis.empty()) throw InvalidArgument("estimate_magnitudes: no data");
  RealMatrix m(basis.front().size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != m.rows()) throw InvalidArgument("estimate_magnitudes: ragged data");
    if (basis[j].minCoeff() < 0.0) throw InvalidArgument("estimate_magnitudes: negative power");
    m.col(static_cast<Eigen::Index>(j)) = basis[j].cwiseSqrt();
  }
  return m;
}

PhaseErrorMap recover_phases(const std::vector<RealVector>& intensities,
                             const RealMatrix& magnitudes) {
  const auto rows = magnitudes.rows();
  const auto n = magnitudes.cols();
  if (n < 2 || intensities.size() != static_cast<std::size_t>(2 * (n - 1))) {
    throw InvalidArgument("recover_phases: expected 2(N-1) probe measurements");
  }
  for (const auto& v : intensities) {
    if (v.size() != rows) throw InvalidArgument("recover_phases: intensity length mismatch");
    if (v.minCoeff() < 0.0) throw InvalidArgument("recover_phases: negative intensity");
  }
  for (Eigen::Index m = 0; m < rows; ++m) {
    if (!(magnitudes(m, 0) > 0.0)) {
      throw InvalidArgument("recover_phases: row " + std::to_string(m) +
                            " has a zero reference element in column 0; permute the columns so "
                            "that column 0 has no zeros");
    }
  }
  PhaseErrorMap out{RealMatrix::Zero(rows, n)};
  for (Eigen::Index j = 1; j < n; ++j) {
    const RealVector& ic = intensities[static_cast<std::size_t>(2 * (j - 1))];
    const RealVector& is = intensities[static_cast<std::size_t>(2 * (j - 1) + 1)];
    for (Eigen::Index m = 0; m < rows; ++m) {
      const double a = magnitudes(m, 0);
      const double b = magnitudes(m, j);
      const double base = a * a + b * b;
      out.eps(m, j) = b > 0.0 ? std::atan2(is[m] - base, ic[m] - base) : 0.0;
    }
  }
  return out;
}

PhaseErrorMap phase_error_from(const ComplexMatrix& target, const PhaseErrorMap& measured) {
  check_shape(target, measured, "phase_error_from");
  PhaseErrorMap e{RealMatrix::Zero(target.rows(), target.cols())};
  for (Eigen::Index m = 0; m < target.rows(); ++m) {
    const double ref = std::arg(target(m, 0));
    for (Eigen::Index j = 1; j < target.cols(); ++j) {
      if (target(m, j) == Complex(0.0, 0.0)) continue;
      e.eps(m, j) = wrap(measured.eps(m, j) - (std::arg(target(m, j)) - ref));
    }
  }
  return e;
}

double phase_map_distance(const PhaseErrorMap& a, const PhaseErrorMap& b) {
  if (a.eps.rows() != b.eps.rows() || a.eps.cols() != b.eps.cols()) {
    throw InvalidArgument("phase_map_distance: shape mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index m = 0; m < a.eps.rows(); ++m) {
    Complex mean(0.0, 0.0);
    for (Eigen::Index j = 0; j < a.eps.cols(); ++j) mean += std::polar(1.0, a.eps(m, j) - b.eps(m, j));
    const double offset = std::arg(mean);
    for (Eigen::Index j = 0; j < a.eps.cols(); ++j) {
      worst = std::max(worst, std::abs(wrap(a.eps(m, j) - b.eps(m, j) - offset)));
    }
  }
  return worst;
}

double row_phase_fidelity(const ComplexMatrix& x_exp, const ComplexMatrix& x) {
  if (x_exp.rows() != x.rows() || x_exp.cols() != x.cols()) {
    throw InvalidArgument("row_phase_fidelity: shape mismatch");
  }
  const double ee = x_exp.squaredNorm();
  const double xx = x.squaredNorm();
  if (ee <= 0.0 || xx <= 0.0) throw InvalidArgument("row_phase_fidelity: zero matrix");
  double s = 0.0;
  for (Eigen::Index m = 0; m < x.rows(); ++m) s += std::abs(x.row(m).dot(x_exp.row(m)));
  return std::min(1.0, s * s / (ee * xx));
}

}  // namespace spatialq
