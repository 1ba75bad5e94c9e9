// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <new>

#include "soundtex/errors.hpp"

namespace soundtex {

namespace {

// FFTW's planner mutates global state; every plan create/destroy must
// hold this lock. Plan execution on distinct buffers needs no lock.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fft::Fft(std::size_t length) : length_(length) {
  if (length == 0) throw InvalidInputError("fft: length must be positive");
  buffer_in_ = fftw_malloc(sizeof(fftw_complex) * length);
  buffer_out_ = fftw_malloc(sizeof(fftw_complex) * length);
  if (buffer_in_ == nullptr || buffer_out_ == nullptr) {
    fftw_free(buffer_in_);
    fftw_free(buffer_out_);
    throw std::bad_alloc();
  }
  auto* in = static_cast<fftw_complex*>(buffer_in_);
  auto* out = static_cast<fftw_complex*>(buffer_out_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE picks a plan without measuring, so repeated runs use
  // the same algorithm and produce bit-identical results.
  plan_forward_ = fftw_plan_dft_1d(static_cast<int>(length), in, out,
                                   FFTW_FORWARD, FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_1d(static_cast<int>(length), in, out,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    if (plan_inverse_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  }
  fftw_free(buffer_in_);
  fftw_free(buffer_out_);
}

void Fft::forward(const std::complex<double>* in, std::complex<double>* out) {
  std::memcpy(buffer_in_, in, length_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  std::memcpy(out, buffer_out_, length_ * sizeof(fftw_complex));
}

void Fft::inverse(const std::complex<double>* in, std::complex<double>* out) {
  std::memcpy(buffer_in_, in, length_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_inverse_));
  const double scale = 1.0 / static_cast<double>(length_);
  const auto* raw = static_cast<const fftw_complex*>(buffer_out_);
  for (std::size_t i = 0; i < length_; ++i) {
    out[i] = std::complex<double>(raw[i][0] * scale, raw[i][1] * scale);
  }
}

std::vector<std::complex<double>> Fft::forward(const std::vector<std::complex<double>>& in) {
  if (in.size() != length_) throw InvalidInputError("fft: input length mismatch");
  std::vector<std::complex<double>> out(length_);
  forward(in.data(), out.data());
  return out;
}

std::vector<std::complex<double>> Fft::inverse(const std::vector<std::complex<double>>& in) {
  if (in.size() != length_) throw InvalidInputError("fft: input length mismatch");
  std::vector<std::complex<double>> out(length_);
  inverse(in.data(), out.data());
  return out;
}

}  // namespace soundtex
