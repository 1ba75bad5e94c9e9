// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_FFT_HPP_
#define SOUNDTEX_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace soundtex {

// Complex-to-complex FFT of a fixed length, backed by FFTW. Plan
// creation and destruction are serialized behind a global mutex, so
// instances may be constructed concurrently; a constructed instance
// owns scratch buffers and must only be used by one thread at a time.
class Fft {
 public:
  explicit Fft(std::size_t length);
  ~Fft();

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t length() const { return length_; }

  // out = DFT(in), unnormalized. Arrays must hold length() elements.
  void forward(const std::complex<double>* in, std::complex<double>* out);

  // out = inverse DFT(in), scaled by 1/length so inverse(forward(x)) == x
  // up to rounding.
  void inverse(const std::complex<double>* in, std::complex<double>* out);

  std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);
  std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in);

 private:
  std::size_t length_ = 0;
  void* plan_forward_ = nullptr;   // fftw_plan
  void* plan_inverse_ = nullptr;   // fftw_plan
  void* buffer_in_ = nullptr;      // fftw_complex[length]
  void* buffer_out_ = nullptr;     // fftw_complex[length]
};

}  // namespace soundtex

#endif  // SOUNDTEX_FFT_HPP_
