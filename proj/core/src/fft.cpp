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


#include "spatialq/fft.hpp"

#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace spatialq {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(int nx, int ny, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_tuple(nx, ny, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // The planner may scribble on its buffer, so plan on scratch memory.
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
  fftw_plan p = fftw_plan_dft_2d(ny, nx, buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p) throw Error("fftw: could not create plan");
  cache.emplace(key, p);
  return p;
}

}  // namespace

Fft2::Fft2(int nx, int ny)
    : nx_(nx),
      ny_(ny),
      fwd_(cached_plan(nx, ny, FFTW_FORWARD)),
      bwd_(cached_plan(nx, ny, FFTW_BACKWARD)) {}

void Fft2::forward(std::span<Complex> data) const {
  if (data.size() != static_cast<std::size_t>(nx_) * ny_) {
    throw InvalidArgument("fft: size mismatch");
  }
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft2::inverse(std::span<Complex> data) const {
  if (data.size() != static_cast<std::size_t>(nx_) * ny_) {
    throw InvalidArgument("fft: size mismatch");
  }
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
  const double s = 1.0 / (static_cast<double>(nx_) * ny_);
  for (auto& v : data) v *= s;
}

}  // namespace spatialq
