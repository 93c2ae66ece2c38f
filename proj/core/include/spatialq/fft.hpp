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

#include <span>

#include "spatialq/types.hpp"

namespace spatialq {

/// In-place 2D discrete Fourier transforms on row-major ny x nx arrays.
/// Plans are created once per shape and shared; execution is thread-safe.
class Fft2 {
 public:
  Fft2(int nx, int ny);

  /// Unnormalized forward transform (exp(-i...)).
  void forward(std::span<Complex> data) const;
  /// Inverse transform including the 1/(nx*ny) factor.
  void inverse(std::span<Complex> data) const;

  int nx() const { return nx_; }
  int ny() const { return ny_; }

 private:
  int nx_;
  int ny_;
  void* fwd_;
  void* bwd_;
};

}  // namespace spatialq
