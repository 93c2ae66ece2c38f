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

#include <benchmark/benchmark.h>

#include "spatialq/linalg.hpp"
#include "spatialq/optsim.hpp"
#include "spatialq/qops.hpp"
#include "spatialq/synthesis.hpp"
#include "spatialq/tomo.hpp"

namespace spatialq {
namespace {

void BM_FresnelPropagate(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  GridSpec g{nx, nx, 8e-6, {}};
  SampledField f(g);
  const double w = 20 * g.pitch;
  for (int iy = 0; iy < nx; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      f.at(ix, iy) = std::exp(-(g.x(ix) * g.x(ix) + g.y(iy) * g.y(iy)) / (w * w));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(fresnel_propagate(f, 0.05, 1.55e-6));
}
BENCHMARK(BM_FresnelPropagate)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_FitGrating(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto rng = split_rng(1, 0);
  const ModeLayout l = desk_circle_layout(n);
  const GratingDesign d = GratingDesign::from_target(random_complex_matrix(n, n, rng), l);
  const GratingBasis basis(d, Side::Splitter, 0, sample_aperture(l, 8e-6));
  const ComplexVector f = d.factor(Side::Splitter, 0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_grating(basis, f, ComplexVector::Ones(n)));
}
BENCHMARK(BM_FitGrating)->Arg(5)->Arg(15)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_TransferMatrix(benchmark::State& state) {
  const SetupConfig c = desk_setup(15);
  const OpticalTrain train(c);
  auto rng = split_rng(2, 0);
  const GratingDesign d = GratingDesign::from_target(random_unitary(15, rng), c.layout,
                                                     Decomposition::Balanced);
  train.transfer_matrix(d);  // warm the propagator and detection caches
  for (auto _ : state) benchmark::DoNotOptimize(train.transfer_matrix(d));
}
BENCHMARK(BM_TransferMatrix)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_CsReconstruct(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const PovmSet povm = sic_povm(15, load_or_find_sic_fiducial(15, SPATIALQ_DATA_DIR));
  auto rng = split_rng(3, 0);
  const DensityMatrix rho = DensityMatrix::pure(random_state(15, rng));
  const ProjectorList sub(povm.states.begin(), povm.states.begin() + m);
  const RealVector p = projection_probabilities(rho, sub);
  for (auto _ : state) benchmark::DoNotOptimize(cs_reconstruct(sub, p));
}
BENCHMARK(BM_CsReconstruct)->Arg(50)->Arg(100)->Arg(225)->Unit(benchmark::kMillisecond);

void BM_SicSearch(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  SicSearchOptions o;
  for (auto _ : state) {
    o.seed += 1;
    benchmark::DoNotOptimize(find_sic_fiducial(d, o));
  }
}
BENCHMARK(BM_SicSearch)->DenseRange(3, 8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace spatialq

BENCHMARK_MAIN();
