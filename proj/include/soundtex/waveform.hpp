// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_WAVEFORM_HPP_
#define SOUNDTEX_WAVEFORM_HPP_

#include <cstddef>
#include <vector>

namespace soundtex {

// Mono audio at a fixed sample rate; samples are dimensionless
// amplitudes, nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;  // Hz

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// Throws InvalidInputError unless the waveform is nonempty, finite,
// and carries a positive sample rate.
void validate(const Waveform& w);

// Band-limited rational-ratio sample rate conversion: polyphase
// windowed sinc with a Kaiser window (beta = 8) and 64 taps per
// polyphase arm at the lower of the two rates. A constant signal maps
// to the same constant exactly; equal rates return the input unchanged.
Waveform resample(const Waveform& w, int target_rate);

// Same kernel applied to a bare sample sequence.
std::vector<double> resample_sequence(const std::vector<double>& x,
                                      int source_rate, int target_rate);

// Output length of resample() for a given input length: the input
// duration times the target rate, rounded to the nearest sample.
std::size_t resampled_length(std::size_t input_length, int source_rate,
                             int target_rate);

}  // namespace soundtex

#endif  // SOUNDTEX_WAVEFORM_HPP_
