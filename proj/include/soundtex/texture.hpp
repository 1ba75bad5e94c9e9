// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_TEXTURE_HPP_
#define SOUNDTEX_TEXTURE_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "soundtex/filterbank.hpp"
#include "soundtex/matrix.hpp"
#include "soundtex/waveform.hpp"

namespace soundtex {

// Analysis window length for one texture vector, seconds.
constexpr double kTextureWindowSeconds = 3.75;

// Bank of constant-Q (Q = 2) cosine bumps in log2 frequency, applied
// to envelope spectra sampled at kEnvelopeRate.
struct ModulationFilterBank {
  int n_filters = 0;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double quality = 2.0;
  std::size_t env_length = 0;  // envelope length the gain grid was built for
  std::vector<double> center_freqs_hz;  // log-spaced, ascending

  // Sampled gain curves over the envelope FFT grid: bin k of row j
  // holds gain(j, k * kEnvelopeRate / env_length), k in [0, env_length/2].
  Matrix frequency_responses;

  // Closed-form filter gain at an arbitrary modulation frequency, Hz.
  double gain(int filter, double freq_hz) const;
};

ModulationFilterBank make_modulation_filterbank(int n_filters, double low_hz,
                                                double high_hz,
                                                std::size_t env_length);

// How per-group entries are rescaled when assembling a texture vector.
enum class GroupRescale {
  kInverseDim,      // each group divided by its own dimensionality
  kInverseSqrtDim,  // divided by the square root instead
};

// Dimensions of one texture vector's blocks.
struct TextureShape {
  int n_channels = 32;
  std::vector<int> offsets = {1, 2, 3, 5};  // channel-pair distances
  int n_modulation = 10;

  std::size_t correlation_count() const;
  std::size_t dimension() const;  // 2n + correlations + n*m + 1
};

// Flat texture vector in block order
// [means | normalized stds | correlations | modulation energies | loudness].
struct SoundTexture {
  std::vector<double> values;
  TextureShape shape;
  GroupRescale rescale = GroupRescale::kInverseDim;
};

// Median-of-frame-norms loudness and the cochleagram divided by it.
// A silent clip (loudness 0) is returned unchanged with loudness 0.
std::pair<Cochleagram, double> loudness_and_normalize(const Cochleagram& c);

struct MarginalStats {
  std::vector<double> mean;  // per channel, time average
  std::vector<double> std;   // per channel, population standard deviation
};

MarginalStats marginal_stats(const Cochleagram& c);

// Pearson correlations of channel pairs (j, j + d) for each offset d,
// ordered by (offset, lower channel). Zero-variance channels yield 0;
// results are clamped to [-1, 1].
std::vector<double> channel_correlations(const Cochleagram& c,
                                         const std::vector<int>& offsets);

// Normalized modulation energy: row c, column j holds
// sqrt(power of envelope c inside modulation filter j) / std of channel c,
// with mean-subtracted envelopes and power measured by Parseval's
// theorem on the envelope FFT. Zero-variance channels yield zero rows.
Matrix modulation_power(const Cochleagram& c, const ModulationFilterBank& bank,
                        const std::vector<double>& channel_std);

// Concatenates the blocks in the order above and rescales each block
// by the inverse of its dimensionality (or its square root). The
// loudness block has dimension 1 and is unchanged by either mode.
SoundTexture assemble_texture(const std::vector<double>& mean,
                              const std::vector<double>& std,
                              const std::vector<double>& correlations,
                              const Matrix& modulation, double loudness,
                              const TextureShape& shape,
                              GroupRescale rescale = GroupRescale::kInverseDim);

SoundTexture texture_from_cochleagram(const Cochleagram& c,
                                      const ModulationFilterBank& bank,
                                      const TextureShape& shape = TextureShape{},
                                      GroupRescale rescale = GroupRescale::kInverseDim);

// Full pipeline for one analysis window centered at t_center_s.
SoundTexture texture_for_window(const Waveform& w,
                                const CochlearFilterBank& bank,
                                const ModulationFilterBank& mod_bank,
                                double t_center_s,
                                double window_s = kTextureWindowSeconds,
                                GroupRescale rescale = GroupRescale::kInverseDim);

}  // namespace soundtex

#endif  // SOUNDTEX_TEXTURE_HPP_
