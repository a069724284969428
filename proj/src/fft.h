// src/fft.h

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

#ifndef OLSAD_FFT_H_
#define OLSAD_FFT_H_

#include <span>
#include <vector>

#include <fftw3.h>

namespace olsad {

// Real-input FFT magnitude spectrum on top of an FFTW plan. Owns its
// buffers, so one instance must not be used from two threads at once.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  int size() const { return size_; }
  // `frame` is zero-padded to size(); writes size() / 2 + 1 magnitudes.
  void Magnitudes(std::span<const double> frame, std::vector<double> *mag) const;

 private:
  int size_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

}  // namespace olsad

#endif  // OLSAD_FFT_H_
