// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_VIZ_HPP_
#define SOUNDTEX_VIZ_HPP_

#include <string>
#include <vector>

#include "soundtex/filterbank.hpp"
#include "soundtex/labels.hpp"
#include "soundtex/texture.hpp"

namespace soundtex {

enum class VizPalette {
  kGrayscale,  // min..max mapped to 0..255
  kDiverging,  // 0 mapped to 128, symmetric around it
};

// Rendering options for cochleagram images.
struct RenderSpec {
  int width = 0;   // 0 means native (one column per frame)
  int height = 0;  // 0 means native (one row per channel)
  VizPalette palette = VizPalette::kGrayscale;
  bool fixed_range = false;  // use range_lo/range_hi instead of data min/max
  double range_lo = 0.0;
  double range_hi = 1.0;
};

// Binary 8-bit PGM ("P5") image of a cochleagram. Row 0 of the image
// is the highest-frequency channel, so low frequencies sit at the
// bottom, and scaling uses nearest-neighbor sampling. The bytes are a
// complete image file.
std::string render_cochleagram(const Cochleagram& c,
                               const RenderSpec& spec = RenderSpec{});

// Per-channel mean values of one centroid with the group rescaling
// undone, as drawn by render_centroid_stats.
std::vector<double> centroid_display_means(const ClusterModel& model, int cluster,
                                           const TextureShape& shape,
                                           GroupRescale rescale);

// Same for the dispersion block (normalized std per channel).
std::vector<double> centroid_display_stds(const ClusterModel& model, int cluster,
                                          const TextureShape& shape,
                                          GroupRescale rescale);

// SVG 1.1 bar chart (640 x 240) of one centroid's per-channel means
// with whiskers spanning +/- one standard deviation (dispersion times
// mean). All coordinates use fixed two-decimal formatting, so output
// is byte-stable for identical inputs.
std::string render_centroid_stats(const ClusterModel& model, int cluster,
                                  const TextureShape& shape = TextureShape{},
                                  GroupRescale rescale = GroupRescale::kInverseDim);

}  // namespace soundtex

#endif  // SOUNDTEX_VIZ_HPP_
