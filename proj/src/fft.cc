// src/fft.cc

// Copyright 2026  The olsad Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "fft.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace olsad {

RealFft::RealFft(int size) : size_(size) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be at least 2");
  in_ = fftw_alloc_real(size);
  out_ = fftw_alloc_complex(size / 2 + 1);
  plan_ = fftw_plan_dft_r2c_1d(size, in_, out_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  fftw_destroy_plan(plan_);
  fftw_free(in_);
  fftw_free(out_);
}

void RealFft::Magnitudes(std::span<const double> frame, std::vector<double> *mag) const {
  if (static_cast<int>(frame.size()) > size_)
    throw std::invalid_argument("RealFft: frame longer than transform");
  std::copy(frame.begin(), frame.end(), in_);
  std::fill(in_ + frame.size(), in_ + size_, 0.0);
  fftw_execute(plan_);
  const int bins = size_ / 2 + 1;
  mag->resize(bins);
  for (int k = 0; k < bins; ++k) (*mag)[k] = std::hypot(out_[k][0], out_[k][1]);
}

}  // namespace olsad
