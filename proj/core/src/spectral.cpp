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

#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace efpi::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  require(n >= 1, ErrorCode::kInvalidArgument, "Fft: size must be positive");
  std::lock_guard lock(planner_mutex());
  buffer_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(Complex) * n));
  require(buffer_ != nullptr, ErrorCode::kInvalidArgument, "Fft: allocation failed");
  const int size = static_cast<int>(n);
  forward_plan_ =
      fftw_plan_dft_1d(size, as_fftw(buffer_), as_fftw(buffer_), FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ =
      fftw_plan_dft_1d(size, as_fftw(buffer_), as_fftw(buffer_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(buffer_);
}

void Fft::forward(std::span<Complex> data) {
  std::copy(data.begin(), data.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(buffer_, buffer_ + n_, data.begin());
}

void Fft::backward(std::span<Complex> data) {
  std::copy(data.begin(), data.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(backward_plan_));
  const double scale = 1.0 / static_cast<double>(n_);
  std::transform(buffer_, buffer_ + n_, data.begin(), [scale](Complex z) { return z * scale; });
}

std::vector<Complex> spectral_derivative(Fft& fft, std::span<const Complex> f,
                                         std::span<const double> k, int order) {
  std::vector<Complex> out(f.begin(), f.end());
  if (order == 0) return out;
  fft.forward(out);
  const std::size_t n = out.size();
  for (std::size_t j = 0; j < n; ++j) {
    Complex factor{1.0, 0.0};
    for (int r = 0; r < order; ++r) factor *= kI * k[j];
    out[j] *= factor;
  }
  if (order % 2 == 1 && n % 2 == 0) out[n / 2] = 0.0;
  fft.backward(out);
  return out;
}

}  // namespace efpi::detail
