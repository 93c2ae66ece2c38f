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


#include "spatialq/qops.hpp"

#include <gsl/gsl_multimin.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "spatialq/linalg.hpp"

namespace spatialq {

namespace {

Complex root_of_unity(long k, int n) {
  return std::polar(1.0, kTwoPi * static_cast<double>(k % n) / n);
}

void check_index(int n, int m, const char* who) {
  if (n < 1 || m < 0 || m >= n) throw InvalidArgument(std::string(who) + ": index out of range");
}

// X^m Z^n psi, without the tau phase.
void weyl_apply(const ComplexVector& psi, int m, int n, ComplexVector& out) {
  const int d = static_cast<int>(psi.size());
  for (int x = 0; x < d; ++x) out[(x + m) % d] = root_of_unity(static_cast<long>(x) * n, d) * psi[x];
}

struct FrameCtx {
  int d;
  std::vector<ComplexVector> shifted;
};

ComplexVector unpack(const gsl_vector* v, int d) {
  ComplexVector psi(d);
  for (int i = 0; i < d; ++i) psi[i] = Complex(gsl_vector_get(v, 2 * i), gsl_vector_get(v, 2 * i + 1));
  return psi;
}

// Frame potential and its gradient with respect to (Re psi, Im psi).
double frame_potential(const ComplexVector& psi, ComplexVector* grad, FrameCtx& ctx) {
  const int d = ctx.d;
  const double n2 = psi.squaredNorm();
  double sum = 0.0;
  ComplexVector g = ComplexVector::Zero(d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      ComplexVector& dpsi = ctx.shifted[static_cast<std::size_t>(m * d + n)];
      weyl_apply(psi, m, n, dpsi);
      const Complex o = psi.dot(dpsi);
      const double o2 = std::norm(o);
      sum += o2 * o2;
      if (grad) g += (4.0 * o2 * std::conj(o)) * dpsi;
    }
  }
  const double n8 = n2 * n2 * n2 * n2;
  const double f = sum / n8;
  if (grad) *grad = 2.0 * (g / n8 - (4.0 * f / n2) * psi);
  return f;
}

double gsl_f(const gsl_vector* v, void* p) {
  auto& ctx = *static_cast<FrameCtx*>(p);
  return frame_potential(unpack(v, ctx.d), nullptr, ctx);
}

void gsl_df(const gsl_vector* v, void* p, gsl_vector* df) {
  auto& ctx = *static_cast<FrameCtx*>(p);
  ComplexVector g;
  frame_potential(unpack(v, ctx.d), &g, ctx);
  for (int i = 0; i < ctx.d; ++i) {
    gsl_vector_set(df, 2 * i, g[i].real());
    gsl_vector_set(df, 2 * i + 1, g[i].imag());
  }
}

void gsl_fdf(const gsl_vector* v, void* p, double* f, gsl_vector* df) {
  auto& ctx = *static_cast<FrameCtx*>(p);
  ComplexVector g;
  *f = frame_potential(unpack(v, ctx.d), &g, ctx);
  for (int i = 0; i < ctx.d; ++i) {
    gsl_vector_set(df, 2 * i, g[i].real());
    gsl_vector_set(df, 2 * i + 1, g[i].imag());
  }
}

ComplexVector minimize_from(const ComplexVector& start, int max_iterations, FrameCtx& ctx) {
  const int d = ctx.d;
  gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, static_cast<std::size_t>(2 * d), &ctx};
  gsl_vector* x = gsl_vector_alloc(2 * d);
  for (int i = 0; i < d; ++i) {
    gsl_vector_set(x, 2 * i, start[i].real());
    gsl_vector_set(x, 2 * i + 1, start[i].imag());
  }
  gsl_multimin_fdfminimizer* s =
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 2 * d);
  gsl_multimin_fdfminimizer_set(s, &fn, x, 0.01, 0.1);
  for (int it = 0; it < max_iterations; ++it) {
    if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_gradient(s->gradient, 1e-12) == GSL_SUCCESS) break;
  }
  ComplexVector psi = unpack(s->x, d);
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return psi.normalized();
}

std::string cache_path(const std::string& dir, int d) {
  return (std::filesystem::path(dir) / ("sic_d" + std::to_string(d) + ".json")).string();
}

}  // namespace

ComplexMatrix qft_matrix(int n) {
  if (n < 1) throw InvalidArgument("qft_matrix: N must be positive");
  ComplexMatrix f(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) f(i, j) = s * root_of_unity(static_cast<long>(i) * j, n);
  }
  return f;
}

ComplexMatrix fourier_basis(int n) { return qft_matrix(n).adjoint(); }

ComplexMatrix shift_matrix(int n, int m) {
  check_index(n, m, "shift_matrix");
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) s((x + m) % n, x) = 1.0;
  return s;
}

ComplexMatrix clock_matrix(int n, int k) {
  check_index(n, k, "clock_matrix");
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) c(x, x) = root_of_unity(static_cast<long>(x) * k, n);
  return c;
}

ComplexVector BipartiteState::vector() const {
  const int d = dim();
  ComplexVector v(static_cast<Eigen::Index>(d) * amps.cols());
  for (int x = 0; x < d; ++x) {
    for (Eigen::Index y = 0; y < amps.cols(); ++y) v[x * amps.cols() + y] = amps(x, y);
  }
  return v;
}

Complex BipartiteState::inner(const BipartiteState& other) const {
  if (amps.rows() != other.amps.rows() || amps.cols() != other.amps.cols()) {
    throw InvalidArgument("BipartiteState::inner: dimension mismatch");
  }
  return (amps.adjoint() * other.amps).trace();
}

BipartiteState bell_state(int n, int m, int k) {
  check_index(n, m, "bell_state");
  check_index(n, k, "bell_state");
  BipartiteState s{ComplexMatrix::Zero(n, n)};
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int x = 0; x < n; ++x) s.amps(x, (x + m) % n) = a * root_of_unity(static_cast<long>(x) * k, n);
  return s;
}

BipartiteState apply_local(const ComplexMatrix& a, const ComplexMatrix& b,
                           const BipartiteState& psi) {
  if (a.cols() != psi.amps.rows() || b.cols() != psi.amps.cols()) {
    throw InvalidArgument("apply_local: dimension mismatch");
  }
  return {a * psi.amps * b.transpose()};
}

ComplexMatrix displacement_operator(int d, int m, int n) {
  check_index(d, m, "displacement_operator");
  check_index(d, n, "displacement_operator");
  const Complex tau = -std::polar(1.0, kPi / d);
  return std::pow(tau, m * n) * shift_matrix(d, m) * clock_matrix(d, n);
}

double sic_deviation(const ComplexVector& fiducial) {
  const int d = static_cast<int>(fiducial.size());
  if (d < 2) throw InvalidArgument("sic_deviation: d must be >= 2");
  const ComplexVector psi = fiducial.normalized();
  ComplexVector dpsi(d);
  double worst = 0.0;
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      if (m == 0 && n == 0) continue;
      weyl_apply(psi, m, n, dpsi);
      worst = std::max(worst, std::abs(std::norm(psi.dot(dpsi)) - 1.0 / (d + 1)));
    }
  }
  return worst;
}

ComplexVector find_sic_fiducial(int d, const SicSearchOptions& opts) {
  if (d < 2) throw InvalidArgument("find_sic_fiducial: d must be >= 2");
  FrameCtx ctx{d, std::vector<ComplexVector>(static_cast<std::size_t>(d * d), ComplexVector(d))};
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    auto rng = split_rng(opts.seed, static_cast<std::uint64_t>(r));
    ComplexVector psi = minimize_from(random_state(d, rng), opts.max_iterations, ctx);
    double dev = sic_deviation(psi);
    // BFGS can stall on the flat directions of the fiducial family; a fresh
    // start from the stalled point usually finishes the descent.
    for (int polish = 0; polish < 5 && dev > 1e-3 * opts.tolerance; ++polish) {
      const ComplexVector again = minimize_from(psi, opts.max_iterations, ctx);
      const double dev2 = sic_deviation(again);
      if (!(dev2 < dev)) break;
      psi = again;
      dev = dev2;
    }
    if (dev < opts.tolerance) return psi;
    best = std::min(best, dev);
  }
  throw ConvergenceError("find_sic_fiducial: no fiducial within tolerance for d = " +
                             std::to_string(d),
                         best);
}

nlohmann::json complex_vector_to_json(const ComplexVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

ComplexVector complex_vector_from_json(const nlohmann::json& j) {
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = Complex(j.at(i).at(0).get<double>(), j.at(i).at(1).get<double>());
  }
  return v;
}

ComplexVector load_or_find_sic_fiducial(int d, const std::string& cache_dir,
                                        const SicSearchOptions& opts) {
  const std::string path = cache_path(cache_dir, d);
  if (std::ifstream in(path); in) {
    const auto j = nlohmann::json::parse(in);
    ComplexVector psi = complex_vector_from_json(j.at("fiducial")).normalized();
    if (psi.size() == d && sic_deviation(psi) < opts.tolerance) return psi;
  }
  ComplexVector psi = find_sic_fiducial(d, opts);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  if (std::ofstream out(path); out) {
    out << nlohmann::json{{"d", d}, {"deviation", sic_deviation(psi)},
                          {"fiducial", complex_vector_to_json(psi)}}
               .dump(1)
        << '\n';
  }
  return psi;
}

ComplexMatrix PovmSet::element(std::size_t i) const {
  return states.at(i) * states.at(i).adjoint() / static_cast<double>(d);
}

double PovmSet::probability(std::size_t i, const ComplexMatrix& rho) const {
  const ComplexVector& s = states.at(i);
  return s.dot(rho * s).real() / d;
}

RealVector PovmSet::probabilities(const ComplexMatrix& rho) const {
  RealVector p(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) p[static_cast<Eigen::Index>(i)] = probability(i, rho);
  return p;
}

double PovmSet::completeness_residual() const {
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& s : states) sum += s * s.adjoint();
  sum /= static_cast<double>(d);
  return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

PovmSet sic_povm(int d, const ComplexVector& fiducial, double tolerance) {
  if (fiducial.size() != d) throw InvalidArgument("sic_povm: fiducial has the wrong length");
  if (std::abs(fiducial.norm() - 1.0) > 1e-8) throw InvalidArgument("sic_povm: fiducial not normalized");
  const double dev = sic_deviation(fiducial);
  if (dev > tolerance) {
    throw InvalidArgument("sic_povm: fiducial is not SIC (deviation " + std::to_string(dev) + ")");
  }
  PovmSet set{d, fiducial, {}};
  set.states.reserve(static_cast<std::size_t>(d * d));
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) set.states.push_back(displacement_operator(d, m, n) * fiducial);
  }
  return set;
}

int classical_order(int a, int modulus) {
  if (modulus < 2 || std::gcd(a, modulus) != 1) {
    throw InvalidArgument("classical_order: a must be coprime to M >= 2");
  }
  long v = a % modulus;
  for (int r = 1; r <= modulus; ++r) {
    if (v == 1) return r;
    v = v * a % modulus;
  }
  throw InvalidArgument("classical_order: no period found");
}

std::vector<int> convergent_denominators(int y, int n) {
  if (n < 1 || y < 0) throw InvalidArgument("convergent_denominators: need y >= 0, n >= 1");
  std::vector<int> out;
  long num = y, den = n;
  long k_prev = 1, k = 0;
  while (den != 0) {
    const long q = num / den;
    const long next = q * k + k_prev;
    k_prev = k;
    k = next;
    out.push_back(static_cast<int>(k));
    const long rem = num - q * den;
    num = den;
    den = rem;
  }
  return out;
}

OrderFindingResult order_finding_demo(int register_size, int modulus, int a) {
  if (register_size < 2 || (register_size & (register_size - 1)) != 0 || register_size < modulus) {
    throw InvalidArgument("order_finding_demo: register size must be a power of 2 >= M");
  }
  if (modulus < 2 || std::gcd(a, modulus) != 1) {
    throw InvalidArgument("order_finding_demo: a must be coprime to M");
  }
  const int n = register_size;
  OrderFindingResult res;
  res.register_size = n;
  res.modulus = modulus;
  res.base = a;
  res.joint = RealMatrix::Zero(n, modulus);
  std::vector<int> f(n);
  long v = 1;
  for (int x = 0; x < n; ++x) {
    f[x] = static_cast<int>(v);
    v = v * a % modulus;
  }
  for (int y = 0; y < n; ++y) {
    std::vector<Complex> amp(modulus, Complex(0.0, 0.0));
    for (int x = 0; x < n; ++x) amp[f[x]] += root_of_unity(static_cast<long>(x) * y, n);
    for (int r = 0; r < modulus; ++r) res.joint(y, r) = std::norm(amp[r]) / (static_cast<double>(n) * n);
  }
  res.marginal = res.joint.rowwise().sum();

  // Outcomes are visited from most to least likely; a candidate denominator
  // is accepted once a^r = 1 mod M.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int p, int q) { return res.marginal[p] > res.marginal[q]; });
  for (int y : order) {
    if (res.marginal[y] < 1e-12) break;
    for (int r : convergent_denominators(y, n)) {
      if (r < 1 || r > modulus) continue;
      long t = 1;
      for (int i = 0; i < r; ++i) t = t * a % modulus;
      if (t == 1 && (res.period == 0 || r < res.period)) res.period = r;
    }
    if (res.period) break;
  }
  if (!res.period) throw ConvergenceError("order_finding_demo: period not recovered", 0.0);
  if (res.period % 2 == 0) {
    long half = 1;
    for (int i = 0; i < res.period / 2; ++i) half = half * a % modulus;
    for (long c : {half - 1, half + 1}) {
      const int g = std::gcd(static_cast<int>((c + modulus) % modulus), modulus);
      if (g > 1 && g < modulus) res.factors.push_back(g);
    }
    std::sort(res.factors.begin(), res.factors.end());
    res.factors.erase(std::unique(res.factors.begin(), res.factors.end()), res.factors.end());
  }
  return res;
}

}  // namespace spatialq
