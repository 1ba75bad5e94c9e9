// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "soundtex/errors.hpp"
#include "soundtex/fft.hpp"
#include "soundtex/util.hpp"

namespace soundtex {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

// Shared scratch state for extracting every channel envelope of one
// clip: the forward transform runs once and per-channel work touches
// only the bins inside that channel's support.
class EnvelopeExtractor {
 public:
  EnvelopeExtractor(const Waveform& w, const CochlearFilterBank& bank)
      : bank_(bank),
        n_(w.samples.size()),
        fft_(w.samples.size()),
        weighted_(w.samples.size()),
        shaped_(w.samples.size(), std::complex<double>(0.0, 0.0)),
        analytic_(w.samples.size()) {
    std::vector<std::complex<double>> in(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      in[i] = std::complex<double>(w.samples[i], 0.0);
    }
    fft_.forward(in.data(), weighted_.data());
    // Pre-apply the analytic-signal weights: keep DC and Nyquist,
    // double strictly positive frequencies, zero the negative half.
    for (std::size_t k = 0; k < n_; ++k) {
      if (2 * k > n_) {
        weighted_[k] = 0.0;
      } else if (k != 0 && 2 * k != n_) {
        weighted_[k] *= 2.0;
      }
    }
  }

  std::vector<double> envelope(int channel) {
    const double bin_hz =
        static_cast<double>(bank_.sample_rate) / static_cast<double>(n_);
    // Widened by one bin per side so edge rounding can never drop a
    // bin carrying nonzero gain; extra bins multiply by exactly zero.
    const auto [lo_hz, hi_hz] = bank_.support_hz(channel);
    const std::size_t k_lo = static_cast<std::size_t>(
        std::max(0.0, std::ceil(lo_hz / bin_hz) - 1.0));
    const std::size_t k_hi = std::min(
        n_ / 2, static_cast<std::size_t>(std::floor(hi_hz / bin_hz) + 1.0));
    for (std::size_t k = k_lo; k <= k_hi && k < shaped_.size(); ++k) {
      const double g = bank_.gain(channel, bin_hz * static_cast<double>(k));
      shaped_[k] = weighted_[k] * g;
    }
    fft_.inverse(shaped_.data(), analytic_.data());
    for (std::size_t k = k_lo; k <= k_hi && k < shaped_.size(); ++k) {
      shaped_[k] = 0.0;  // restore the all-zero scratch state
    }
    std::vector<double> env(n_);
    for (std::size_t i = 0; i < n_; ++i) env[i] = std::abs(analytic_[i]);
    return env;
  }

 private:
  const CochlearFilterBank& bank_;
  std::size_t n_;
  Fft fft_;
  std::vector<std::complex<double>> weighted_;
  std::vector<std::complex<double>> shaped_;
  std::vector<std::complex<double>> analytic_;
};

}  // namespace

double hz_to_erb(double hz) { return 9.265 * std::log(1.0 + hz / 228.8); }

double erb_to_hz(double erb) { return 228.8 * (std::exp(erb / 9.265) - 1.0); }

double CochlearFilterBank::gain(int channel, double freq_hz) const {
  if (freq_hz < low_hz || freq_hz > high_hz) return 0.0;
  const double erb = hz_to_erb(freq_hz);
  // Knots sit at erb_lo_ + k * erb_step_ for k = 0..n+1; channel c is
  // centered on knot c + 1 and spans two knot intervals.
  const double offset =
      (erb - (erb_lo_ + (channel + 1) * erb_step_)) / erb_step_;
  if (channel == 0 && offset <= 0.0) return 1.0;  // lowpass shoulder
  if (channel == n_channels - 1 && offset >= 0.0) return 1.0;  // highpass shoulder
  if (offset <= -1.0 || offset >= 1.0) return 0.0;
  return std::cos(offset * std::numbers::pi / 2.0);
}

std::pair<double, double> CochlearFilterBank::support_hz(int channel) const {
  if (channel < 0 || channel >= n_channels) {
    throw IndexError("filterbank: channel out of range");
  }
  double lo = erb_to_hz(erb_lo_ + channel * erb_step_);
  double hi = erb_to_hz(erb_lo_ + (channel + 2) * erb_step_);
  if (channel == 0) lo = low_hz;                // lowpass shoulder
  if (channel == n_channels - 1) hi = high_hz;  // highpass shoulder
  return {std::max(lo, low_hz), std::min(hi, high_hz)};
}

CochlearFilterBank make_cochlear_filterbank(int n_channels, double low_hz,
                                            double high_hz, int fft_length,
                                            int sample_rate) {
  if (n_channels < 2) throw InvalidConfigError("filterbank: need at least 2 channels");
  if (!(low_hz > 0.0) || !(high_hz > low_hz)) {
    throw InvalidConfigError("filterbank: need 0 < low_hz < high_hz");
  }
  if (sample_rate <= 0) throw InvalidConfigError("filterbank: sample rate must be positive");
  if (high_hz > sample_rate / 2.0) {
    throw InvalidConfigError("filterbank: high_hz exceeds Nyquist");
  }
  if (!is_power_of_two(fft_length) ||
      fft_length < static_cast<int>(2.0 * sample_rate * 0.1)) {
    throw InvalidConfigError(
        "filterbank: fft_length must be a power of two covering 0.2 s");
  }
  CochlearFilterBank bank;
  bank.n_channels = n_channels;
  bank.low_hz = low_hz;
  bank.high_hz = high_hz;
  bank.sample_rate = sample_rate;
  bank.fft_length = fft_length;
  bank.erb_lo_ = hz_to_erb(low_hz);
  const double erb_hi = hz_to_erb(high_hz);
  bank.erb_step_ = (erb_hi - bank.erb_lo_) / (n_channels + 1);
  bank.center_freqs_hz.resize(n_channels);
  for (int c = 0; c < n_channels; ++c) {
    bank.center_freqs_hz[c] = erb_to_hz(bank.erb_lo_ + (c + 1) * bank.erb_step_);
  }
  const std::size_t n_bins = static_cast<std::size_t>(fft_length / 2 + 1);
  bank.frequency_responses = Matrix(n_channels, n_bins);
  const double bin_hz = static_cast<double>(sample_rate) / fft_length;
  for (int c = 0; c < n_channels; ++c) {
    double* row = bank.frequency_responses.row(c);
    for (std::size_t k = 0; k < n_bins; ++k) {
      row[k] = bank.gain(c, bin_hz * static_cast<double>(k));
    }
  }
  return bank;
}

std::vector<double> subband_envelope(const Waveform& w,
                                     const CochlearFilterBank& bank,
                                     int channel) {
  validate(w);
  if (w.sample_rate != bank.sample_rate) {
    throw InvalidInputError("subband_envelope: waveform rate does not match bank");
  }
  if (channel < 0 || channel >= bank.n_channels) {
    throw IndexError("subband_envelope: channel out of range");
  }
  EnvelopeExtractor extractor(w, bank);
  return extractor.envelope(channel);
}

std::vector<double> compress_and_downsample(const std::vector<double>& envelope,
                                            int source_rate) {
  if (envelope.empty()) throw InvalidInputError("envelope: empty input");
  if (source_rate <= 0) throw InvalidInputError("envelope: rate must be positive");
  std::vector<double> compressed(envelope.size());
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    const double v = envelope[i];
    if (!(v >= 0.0)) {
      throw InvalidInputError("envelope: entries must be finite and nonnegative");
    }
    compressed[i] = std::pow(v, kCompressionExponent);
  }
  std::vector<double> down =
      resample_sequence(compressed, source_rate, kEnvelopeRate);
  for (double& v : down) {
    if (v < 0.0) v = 0.0;  // clamp interpolation undershoot
  }
  return down;
}

Cochleagram compute_cochleagram(const Waveform& w, const CochlearFilterBank& bank) {
  validate(w);
  if (w.sample_rate != bank.sample_rate) {
    throw InvalidInputError("cochleagram: waveform rate does not match bank");
  }
  if (w.duration_s() < kMinClipSeconds) {
    throw InvalidInputError("cochleagram: clip shorter than 0.05 s");
  }
  Cochleagram out;
  out.env_rate = kEnvelopeRate;
  out.source_rate = w.sample_rate;
  out.center_freqs_hz = bank.center_freqs_hz;
  EnvelopeExtractor extractor(w, bank);
  std::vector<std::vector<double>> rows(bank.n_channels);
  for (int c = 0; c < bank.n_channels; ++c) {
    rows[c] = compress_and_downsample(extractor.envelope(c), w.sample_rate);
  }
  out.envelopes = Matrix(bank.n_channels, rows[0].size());
  for (int c = 0; c < bank.n_channels; ++c) {
    std::copy(rows[c].begin(), rows[c].end(), out.envelopes.row(c));
  }
  return out;
}

}  // namespace soundtex
