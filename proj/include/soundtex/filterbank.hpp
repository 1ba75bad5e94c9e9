// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_FILTERBANK_HPP_
#define SOUNDTEX_FILTERBANK_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "soundtex/matrix.hpp"
#include "soundtex/waveform.hpp"

namespace soundtex {

// Envelope sample rate after downsampling, Hz.
constexpr int kEnvelopeRate = 400;

// Exponent of the amplitude compression applied to subband envelopes.
constexpr double kCompressionExponent = 0.3;

// Shortest clip accepted by the envelope pipeline, seconds.
constexpr double kMinClipSeconds = 0.05;

// ERB-number scale (Glasberg & Moore).
double hz_to_erb(double hz);
double erb_to_hz(double erb);

// Bank of half-cosine bandpass filters equally spaced on the ERB
// scale with 50% overlap. The lowest and highest channels absorb flat
// lowpass/highpass shoulders so that summed squared gains equal 1
// across the whole [low_hz, high_hz] passband.
struct CochlearFilterBank {
  int n_channels = 0;
  double low_hz = 0.0;
  double high_hz = 0.0;
  int sample_rate = 0;
  int fft_length = 0;
  std::vector<double> center_freqs_hz;  // ascending, strictly inside (low, high)

  // Sampled gain curves over the real FFT grid: bin k of row c holds
  // gain(c, k * sample_rate / fft_length) for k in [0, fft_length/2].
  Matrix frequency_responses;

  // Closed-form channel gain at an arbitrary frequency, Hz.
  double gain(int channel, double freq_hz) const;

  // Frequency interval outside which gain(channel, f) is exactly zero.
  std::pair<double, double> support_hz(int channel) const;

  double erb_lo_ = 0.0;    // erb(low_hz)
  double erb_step_ = 0.0;  // knot spacing on the ERB scale
};

CochlearFilterBank make_cochlear_filterbank(int n_channels, double low_hz,
                                            double high_hz, int fft_length,
                                            int sample_rate);

// Magnitude of the analytic signal of one filtered subband, computed
// in the frequency domain over the whole clip. Output length equals
// the input length; all entries are nonnegative.
std::vector<double> subband_envelope(const Waveform& w,
                                     const CochlearFilterBank& bank,
                                     int channel);

// Power-law compression (exponent 0.3) followed by resampling to the
// 400 Hz envelope rate. Negative resampling undershoot is clamped to
// zero so downstream statistics see nonnegative envelopes.
std::vector<double> compress_and_downsample(const std::vector<double>& envelope,
                                            int source_rate);

// Compressed subband envelopes of a whole clip: one row per channel,
// ascending center frequency, sampled at kEnvelopeRate.
struct Cochleagram {
  Matrix envelopes;  // n_channels x frames
  int env_rate = kEnvelopeRate;
  int source_rate = 0;
  std::vector<double> center_freqs_hz;

  int channels() const { return static_cast<int>(envelopes.rows); }
  std::size_t frames() const { return envelopes.cols; }
};

Cochleagram compute_cochleagram(const Waveform& w, const CochlearFilterBank& bank);

}  // namespace soundtex

#endif  // SOUNDTEX_FILTERBANK_HPP_
