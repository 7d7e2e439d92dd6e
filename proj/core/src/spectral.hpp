// Copyright 2026 The efpi-lab Authors
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

#include <cstddef>
#include <span>
#include <vector>

#include "efpi/types.hpp"

namespace efpi::detail {

/// Per-call FFTW workspace. Plans are created under a process-wide mutex
/// (the FFTW planner is not re-entrant); execution needs no locking.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  /// In-place unnormalized forward transform, sum_j f_j e^{-2 pi i jk/n}.
  void forward(std::span<Complex> data);
  /// In-place backward transform including the 1/n factor.
  void backward(std::span<Complex> data);

 private:
  std::size_t n_;
  Complex* buffer_;
  void* forward_plan_;
  void* backward_plan_;
};

/// n-th spatial derivative on the periodic grid with wavenumbers `k`. Odd
/// orders drop the Nyquist component.
std::vector<Complex> spectral_derivative(Fft& fft, std::span<const Complex> f,
                                         std::span<const double> k, int order);

}  // namespace efpi::detail
