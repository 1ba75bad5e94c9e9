// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "soundtex/errors.hpp"
#include "soundtex/util.hpp"

namespace soundtex {

namespace {

constexpr int kTapsPerPhase = 64;
constexpr double kKaiserBeta = 8.0;

// Modified Bessel function I0 via its power series; for arguments up
// to kKaiserBeta the series converges in well under 64 terms.
double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double half = 0.5 * x;
  for (int k = 1; k < 64; ++k) {
    const double factor = half / k;
    term *= factor * factor;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Prototype lowpass on the common upsampled grid (rate source * L
// == target * M / gcd scaling). The symmetric kernel spans
// kTapsPerPhase periods of the lower of the two rates, so each output
// sample touches at most kTapsPerPhase * max(1, M/L) inputs.
struct Kernel {
  std::int64_t up = 1;          // L: upsampling factor
  std::int64_t down = 1;        // M: downsampling factor
  std::int64_t half = 0;        // kernel support is [-half, half]
  std::vector<double> taps;     // length 2 * half + 1, symmetric
  std::vector<double> phase_gain;  // per-phase DC normalizer, length L
};

Kernel design_kernel(std::int64_t up, std::int64_t down) {
  Kernel k;
  k.up = up;
  k.down = down;
  const std::int64_t stretch = std::max(up, down);
  k.half = static_cast<std::int64_t>(kTapsPerPhase / 2) * stretch;
  const double cutoff = 0.5 / static_cast<double>(stretch);
  const double i0_beta = bessel_i0(kKaiserBeta);
  k.taps.resize(static_cast<std::size_t>(2 * k.half + 1));
  for (std::int64_t q = -k.half; q <= k.half; ++q) {
    double sinc;
    if (q == 0) {
      sinc = 2.0 * cutoff;
    } else {
      const double t = static_cast<double>(q);
      sinc = std::sin(2.0 * std::numbers::pi * cutoff * t) /
             (std::numbers::pi * t);
    }
    const double r = static_cast<double>(q) / static_cast<double>(k.half);
    const double window =
        bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    k.taps[static_cast<std::size_t>(q + k.half)] = sinc * window;
  }
  // Normalize each polyphase arm to unit DC gain so that a constant
  // input reproduces the same constant exactly at every output phase.
  k.phase_gain.assign(static_cast<std::size_t>(up), 0.0);
  for (std::int64_t q = -k.half; q <= k.half; ++q) {
    const std::int64_t phase = ((q % up) + up) % up;
    k.phase_gain[static_cast<std::size_t>(phase)] +=
        k.taps[static_cast<std::size_t>(q + k.half)];
  }
  for (double& g : k.phase_gain) g = 1.0 / g;
  return k;
}

std::vector<double> apply_kernel(const Kernel& k, const std::vector<double>& x) {
  const std::int64_t n_in = static_cast<std::int64_t>(x.size());
  const std::int64_t n_out = (n_in * k.up + k.down / 2) / k.down;
  std::vector<double> out(static_cast<std::size_t>(n_out));
  const double* taps = k.taps.data();
  const double* in = x.data();
  for (std::int64_t n = 0; n < n_out; ++n) {
    // Output n sits at position n * down on the upsampled grid; input
    // j sits at j * up. The kernel argument is their difference.
    const std::int64_t center = n * k.down;
    const std::int64_t num = center - k.half;
    const std::int64_t j_first =
        num >= 0 ? (num + k.up - 1) / k.up : num / k.up;  // ceil
    const std::int64_t j_last = (center + k.half) / k.up;  // floor
    // The kernel is symmetric, so taps[half + (j*up - center)] equals
    // taps[half + (center - j*up)]; the former walks forward in memory.
    std::int64_t tap_index = k.half + j_first * k.up - center;
    double acc = 0.0;
    if (j_first >= 0 && j_last < n_in) {
      std::int64_t j = j_first;
      if (k.up == 1) {
        // Four independent partial sums break the add dependency chain;
        // the summation tree is fixed, so results stay deterministic.
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (; j + 3 <= j_last; j += 4, tap_index += 4) {
          s0 += in[j] * taps[tap_index];
          s1 += in[j + 1] * taps[tap_index + 1];
          s2 += in[j + 2] * taps[tap_index + 2];
          s3 += in[j + 3] * taps[tap_index + 3];
        }
        acc = (s0 + s1) + (s2 + s3);
      }
      for (; j <= j_last; ++j, tap_index += k.up) {
        acc += in[j] * taps[tap_index];
      }
    } else {
      // Boundary outputs replicate the edge samples across the full
      // kernel span, so a constant input reproduces the constant at
      // every output, not just interior ones.
      for (std::int64_t j = j_first; j <= j_last; ++j, tap_index += k.up) {
        const std::int64_t jj = std::clamp(j, std::int64_t{0}, n_in - 1);
        acc += in[jj] * taps[tap_index];
      }
    }
    out[static_cast<std::size_t>(n)] =
        acc * k.phase_gain[static_cast<std::size_t>(center % k.up)];
  }
  return out;
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0) throw InvalidInputError("waveform: sample rate must be positive");
  if (w.samples.empty()) throw InvalidInputError("waveform: empty sample buffer");
  require_finite(w.samples, "waveform");
}

std::size_t resampled_length(std::size_t input_length, int source_rate,
                             int target_rate) {
  if (source_rate <= 0 || target_rate <= 0) {
    throw InvalidInputError("resample: rates must be positive");
  }
  if (source_rate == target_rate) return input_length;
  const std::int64_t g = std::gcd(source_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = source_rate / g;
  const auto n = static_cast<std::int64_t>(input_length);
  return static_cast<std::size_t>((n * up + down / 2) / down);
}

std::vector<double> resample_sequence(const std::vector<double>& x,
                                      int source_rate, int target_rate) {
  if (source_rate <= 0 || target_rate <= 0) {
    throw InvalidInputError("resample: rates must be positive");
  }
  if (x.empty()) throw InvalidInputError("resample: empty input");
  if (source_rate == target_rate) return x;
  if (x.size() < 2) {
    throw InvalidInputError("resample: input too short for interpolation kernel");
  }
  const std::int64_t g = std::gcd(source_rate, target_rate);
  const Kernel k = design_kernel(target_rate / g, source_rate / g);
  return apply_kernel(k, x);
}

Waveform resample(const Waveform& w, int target_rate) {
  validate(w);
  if (target_rate <= 0) throw InvalidInputError("resample: target rate must be positive");
  if (w.sample_rate == target_rate) return w;
  Waveform out;
  out.sample_rate = target_rate;
  out.samples = resample_sequence(w.samples, w.sample_rate, target_rate);
  return out;
}

}  // namespace soundtex
