// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/texture.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "soundtex/errors.hpp"
#include "soundtex/fft.hpp"
#include "soundtex/util.hpp"

namespace soundtex {

namespace {

// Half-width of the cosine support in octaves for a given quality
// factor: the -3 dB points sit d octaves from the center, the gain
// reaches zero at 2d.
double half_width_octaves(double quality) {
  const double u = (1.0 / quality + std::sqrt(1.0 / (quality * quality) + 4.0)) / 2.0;
  return std::log2(u);
}

}  // namespace

double ModulationFilterBank::gain(int filter, double freq_hz) const {
  if (freq_hz <= 0.0) return 0.0;
  const double d = half_width_octaves(quality);
  const double offset = std::log2(freq_hz / center_freqs_hz[filter]);
  if (offset <= -2.0 * d || offset >= 2.0 * d) return 0.0;
  return std::cos(offset * std::numbers::pi / (4.0 * d));
}

ModulationFilterBank make_modulation_filterbank(int n_filters, double low_hz,
                                                double high_hz,
                                                std::size_t env_length) {
  if (n_filters < 1) throw InvalidConfigError("modulation bank: need at least 1 filter");
  if (!(low_hz > 0.0) || !(high_hz > low_hz)) {
    throw InvalidConfigError("modulation bank: need 0 < low_hz < high_hz");
  }
  if (high_hz > kEnvelopeRate / 2.0) {
    throw InvalidConfigError("modulation bank: high_hz exceeds envelope Nyquist");
  }
  if (env_length < 2) throw InvalidConfigError("modulation bank: envelope too short");
  ModulationFilterBank bank;
  bank.n_filters = n_filters;
  bank.low_hz = low_hz;
  bank.high_hz = high_hz;
  bank.env_length = env_length;
  bank.center_freqs_hz.resize(n_filters);
  if (n_filters == 1) {
    bank.center_freqs_hz[0] = low_hz;
  } else {
    const double ratio = high_hz / low_hz;
    for (int j = 0; j < n_filters; ++j) {
      bank.center_freqs_hz[j] =
          low_hz * std::pow(ratio, static_cast<double>(j) / (n_filters - 1));
    }
  }
  const std::size_t n_bins = env_length / 2 + 1;
  bank.frequency_responses = Matrix(n_filters, n_bins);
  const double bin_hz = static_cast<double>(kEnvelopeRate) / env_length;
  for (int j = 0; j < n_filters; ++j) {
    double* row = bank.frequency_responses.row(j);
    for (std::size_t k = 0; k < n_bins; ++k) {
      row[k] = bank.gain(j, bin_hz * static_cast<double>(k));
    }
  }
  return bank;
}

std::size_t TextureShape::correlation_count() const {
  std::size_t count = 0;
  for (int d : offsets) {
    if (d >= 1 && d < n_channels) count += static_cast<std::size_t>(n_channels - d);
  }
  return count;
}

std::size_t TextureShape::dimension() const {
  return 2 * static_cast<std::size_t>(n_channels) + correlation_count() +
         static_cast<std::size_t>(n_channels) * n_modulation + 1;
}

std::pair<Cochleagram, double> loudness_and_normalize(const Cochleagram& c) {
  const std::size_t frames = c.frames();
  const int channels = c.channels();
  if (frames == 0 || channels == 0) {
    throw InvalidInputError("loudness: empty cochleagram");
  }
  std::vector<double> frame_norms(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double sum_sq = 0.0;
    for (int ch = 0; ch < channels; ++ch) {
      const double v = c.envelopes(ch, t);
      sum_sq += v * v;
    }
    frame_norms[t] = std::sqrt(sum_sq);
  }
  const double loudness = median_of(frame_norms);
  Cochleagram normalized = c;
  if (loudness > 0.0) {
    for (double& v : normalized.envelopes.data) v /= loudness;
  }
  return {std::move(normalized), loudness};
}

MarginalStats marginal_stats(const Cochleagram& c) {
  const std::size_t frames = c.frames();
  const int channels = c.channels();
  if (frames == 0 || channels == 0) {
    throw InvalidInputError("marginal stats: empty cochleagram");
  }
  MarginalStats stats;
  stats.mean.resize(channels);
  stats.std.resize(channels);
  for (int ch = 0; ch < channels; ++ch) {
    const double* row = c.envelopes.row(ch);
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) sum += row[t];
    const double mean = sum / static_cast<double>(frames);
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const double d = row[t] - mean;
      sum_sq += d * d;
    }
    stats.mean[ch] = mean;
    stats.std[ch] = std::sqrt(sum_sq / static_cast<double>(frames));
  }
  return stats;
}

std::vector<double> channel_correlations(const Cochleagram& c,
                                         const std::vector<int>& offsets) {
  const std::size_t frames = c.frames();
  const int channels = c.channels();
  if (channels == 0) throw InvalidInputError("correlations: empty cochleagram");
  if (frames < 2) throw InvalidInputError("correlations: need at least 2 frames");
  for (int d : offsets) {
    if (d < 1) throw InvalidConfigError("correlations: offsets must be >= 1");
  }
  // Center every channel once; correlations reuse the centered rows.
  Matrix centered(channels, frames);
  std::vector<double> sum_sq(channels);
  for (int ch = 0; ch < channels; ++ch) {
    const double* row = c.envelopes.row(ch);
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) sum += row[t];
    const double mean = sum / static_cast<double>(frames);
    double* out = centered.row(ch);
    double ss = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      out[t] = row[t] - mean;
      ss += out[t] * out[t];
    }
    sum_sq[ch] = ss;
  }
  std::vector<double> result;
  for (int d : offsets) {
    for (int j = 0; j + d < channels; ++j) {
      const int k = j + d;
      if (sum_sq[j] == 0.0 || sum_sq[k] == 0.0) {
        result.push_back(0.0);
        continue;
      }
      const double* a = centered.row(j);
      const double* b = centered.row(k);
      double cross = 0.0;
      for (std::size_t t = 0; t < frames; ++t) cross += a[t] * b[t];
      // One sqrt of the product keeps a channel's correlation with
      // itself at exactly 1 in floating point.
      double r = cross / std::sqrt(sum_sq[j] * sum_sq[k]);
      r = std::clamp(r, -1.0, 1.0);
      result.push_back(r);
    }
  }
  return result;
}

Matrix modulation_power(const Cochleagram& c, const ModulationFilterBank& bank,
                        const std::vector<double>& channel_std) {
  const std::size_t frames = c.frames();
  const int channels = c.channels();
  if (frames < 16) throw InvalidInputError("modulation power: need at least 16 frames");
  if (bank.env_length != frames) {
    throw InvalidConfigError("modulation power: bank built for a different length");
  }
  if (channel_std.size() != static_cast<std::size_t>(channels)) {
    throw InvalidInputError("modulation power: std vector length mismatch");
  }
  Matrix result(channels, bank.n_filters, 0.0);
  Fft fft(frames);
  std::vector<std::complex<double>> buf(frames);
  const std::size_t n_bins = frames / 2 + 1;
  std::vector<double> power_by_bin(n_bins);
  const double inv_n_sq = 1.0 / (static_cast<double>(frames) * static_cast<double>(frames));
  for (int ch = 0; ch < channels; ++ch) {
    if (channel_std[ch] == 0.0) continue;  // constant envelope: row stays zero
    const double* row = c.envelopes.row(ch);
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) sum += row[t];
    const double mean = sum / static_cast<double>(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      buf[t] = std::complex<double>(row[t] - mean, 0.0);
    }
    std::vector<std::complex<double>> spec = fft.forward(buf);
    // Fold conjugate-symmetric bins so each gain curve is applied on
    // nonnegative frequencies only.
    for (std::size_t k = 0; k < n_bins; ++k) {
      double p = std::norm(spec[k]);
      const std::size_t mirror = (frames - k) % frames;
      if (mirror != k) p += std::norm(spec[mirror]);
      power_by_bin[k] = p;
    }
    for (int j = 0; j < bank.n_filters; ++j) {
      const double* gains = bank.frequency_responses.row(j);
      double band_power = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) {
        if (gains[k] != 0.0) band_power += power_by_bin[k] * gains[k] * gains[k];
      }
      // Parseval: mean squared value of the filtered envelope equals
      // sum of |X_k G_k|^2 / N^2 over all N bins.
      result(ch, j) = std::sqrt(band_power * inv_n_sq) / channel_std[ch];
    }
  }
  return result;
}

SoundTexture assemble_texture(const std::vector<double>& mean,
                              const std::vector<double>& std,
                              const std::vector<double>& correlations,
                              const Matrix& modulation, double loudness,
                              const TextureShape& shape, GroupRescale rescale) {
  const std::size_t n = static_cast<std::size_t>(shape.n_channels);
  const std::size_t m = static_cast<std::size_t>(shape.n_modulation);
  if (mean.size() != n || std.size() != n) {
    throw InvalidInputError("assemble: marginal block size mismatch");
  }
  if (correlations.size() != shape.correlation_count()) {
    throw InvalidInputError("assemble: correlation block size mismatch");
  }
  if (modulation.rows != n || modulation.cols != m) {
    throw InvalidInputError("assemble: modulation block size mismatch");
  }
  const bool sqrt_mode = rescale == GroupRescale::kInverseSqrtDim;
  auto factor = [sqrt_mode](std::size_t dim) {
    const double d = static_cast<double>(dim);
    return 1.0 / (sqrt_mode ? std::sqrt(d) : d);
  };
  SoundTexture tex;
  tex.shape = shape;
  tex.rescale = rescale;
  tex.values.reserve(shape.dimension());
  const double f_marginal = factor(n);
  for (std::size_t i = 0; i < n; ++i) tex.values.push_back(mean[i] * f_marginal);
  for (std::size_t i = 0; i < n; ++i) {
    // Normalized dispersion: std relative to the channel mean.
    const double v = mean[i] == 0.0 ? 0.0 : std[i] / mean[i];
    tex.values.push_back(v * f_marginal);
  }
  const double f_corr = factor(shape.correlation_count());
  for (double r : correlations) tex.values.push_back(r * f_corr);
  const double f_mod = factor(n * m);
  for (double b : modulation.data) tex.values.push_back(b * f_mod);
  tex.values.push_back(loudness);  // group of dimension 1
  return tex;
}

SoundTexture texture_from_cochleagram(const Cochleagram& c,
                                      const ModulationFilterBank& bank,
                                      const TextureShape& shape,
                                      GroupRescale rescale) {
  if (c.channels() != shape.n_channels) {
    throw InvalidInputError("texture: cochleagram channel count mismatch");
  }
  if (bank.n_filters != shape.n_modulation) {
    throw InvalidInputError("texture: modulation filter count mismatch");
  }
  auto [normalized, loudness] = loudness_and_normalize(c);
  const MarginalStats stats = marginal_stats(normalized);
  const std::vector<double> rho = channel_correlations(normalized, shape.offsets);
  const Matrix mod = modulation_power(normalized, bank, stats.std);
  return assemble_texture(stats.mean, stats.std, rho, mod, loudness, shape, rescale);
}

SoundTexture texture_for_window(const Waveform& w, const CochlearFilterBank& bank,
                                const ModulationFilterBank& mod_bank,
                                double t_center_s, double window_s,
                                GroupRescale rescale) {
  validate(w);
  if (!(window_s > 0.0)) throw InvalidConfigError("texture: window must be positive");
  const auto n_window = static_cast<std::int64_t>(
      std::llround(window_s * w.sample_rate));
  const auto start = static_cast<std::int64_t>(
      std::llround((t_center_s - window_s / 2.0) * w.sample_rate));
  const auto n_total = static_cast<std::int64_t>(w.samples.size());
  if (start < 0 || start + n_window > n_total) {
    throw OutOfRangeError("texture: window extends past the clip");
  }
  Waveform window;
  window.sample_rate = w.sample_rate;
  window.samples.assign(w.samples.begin() + start,
                        w.samples.begin() + start + n_window);
  const Cochleagram c = compute_cochleagram(window, bank);
  TextureShape shape;
  shape.n_channels = bank.n_channels;
  shape.n_modulation = mod_bank.n_filters;
  return texture_from_cochleagram(c, mod_bank, shape, rescale);
}

}  // namespace soundtex
