// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "soundtex/errors.hpp"

namespace soundtex {

namespace {

std::uint8_t shade(double value, double lo, double hi, VizPalette palette) {
  if (palette == VizPalette::kDiverging) {
    const double magnitude = std::max(std::abs(lo), std::abs(hi));
    if (magnitude == 0.0) return 128;
    const long level = 128 + std::lround(127.0 * (value / magnitude));
    return static_cast<std::uint8_t>(std::clamp(level, 0L, 255L));
  }
  if (hi <= lo) return 0;
  const long level = std::lround(255.0 * (value - lo) / (hi - lo));
  return static_cast<std::uint8_t>(std::clamp(level, 0L, 255L));
}

// Fixed two-decimal formatting keeps SVG output byte-stable.
std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string general3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double group_factor(std::size_t dim, GroupRescale rescale) {
  const double d = static_cast<double>(dim);
  return rescale == GroupRescale::kInverseSqrtDim ? std::sqrt(d) : d;
}

void check_centroid_args(const ClusterModel& model, int cluster,
                         const TextureShape& shape) {
  if (cluster < 0 || cluster >= model.k) {
    throw IndexError("centroid render: cluster out of range");
  }
  if (model.dim != shape.dimension()) {
    throw InvalidInputError("centroid render: centroid length does not match shape");
  }
}

}  // namespace

std::string render_cochleagram(const Cochleagram& c, const RenderSpec& spec) {
  const int channels = c.channels();
  const auto frames = static_cast<int>(c.frames());
  if (channels == 0 || frames == 0) {
    throw InvalidInputError("cochleagram render: empty input");
  }
  if (spec.width < 0 || spec.height < 0) {
    throw InvalidConfigError("cochleagram render: negative output size");
  }
  if (spec.fixed_range && !(spec.range_hi > spec.range_lo)) {
    throw InvalidConfigError("cochleagram render: empty fixed range");
  }
  double lo;
  double hi;
  if (spec.fixed_range) {
    lo = spec.range_lo;
    hi = spec.range_hi;
  } else {
    lo = c.envelopes.data[0];
    hi = c.envelopes.data[0];
    for (double v : c.envelopes.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const int width = spec.width > 0 ? spec.width : frames;
  const int height = spec.height > 0 ? spec.height : channels;
  std::string out = "P5\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    // Image rows run top-down; channel rows run low to high frequency.
    const int source_row = r * channels / height;
    const int channel = channels - 1 - source_row;
    for (int col = 0; col < width; ++col) {
      const int frame = static_cast<int>(
          static_cast<std::int64_t>(col) * frames / width);
      out.push_back(static_cast<char>(
          shade(c.envelopes(channel, frame), lo, hi, spec.palette)));
    }
  }
  return out;
}

std::vector<double> centroid_display_means(const ClusterModel& model, int cluster,
                                           const TextureShape& shape,
                                           GroupRescale rescale) {
  check_centroid_args(model, cluster, shape);
  const auto n = static_cast<std::size_t>(shape.n_channels);
  const double factor = group_factor(n, rescale);
  const double* centroid = model.centroids.row(static_cast<std::size_t>(cluster));
  std::vector<double> means(n);
  for (std::size_t i = 0; i < n; ++i) means[i] = centroid[i] * factor;
  return means;
}

std::vector<double> centroid_display_stds(const ClusterModel& model, int cluster,
                                          const TextureShape& shape,
                                          GroupRescale rescale) {
  check_centroid_args(model, cluster, shape);
  const auto n = static_cast<std::size_t>(shape.n_channels);
  const double factor = group_factor(n, rescale);
  const double* centroid = model.centroids.row(static_cast<std::size_t>(cluster));
  std::vector<double> stds(n);
  for (std::size_t i = 0; i < n; ++i) stds[i] = centroid[n + i] * factor;
  return stds;
}

std::string render_centroid_stats(const ClusterModel& model, int cluster,
                                  const TextureShape& shape,
                                  GroupRescale rescale) {
  const std::vector<double> means =
      centroid_display_means(model, cluster, shape, rescale);
  const std::vector<double> stds =
      centroid_display_stds(model, cluster, shape, rescale);
  const std::size_t n = means.size();
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 240.0;
  constexpr double kLeft = 46.0;
  constexpr double kRight = 10.0;
  constexpr double kTop = 10.0;
  constexpr double kBottom = 28.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  // The dispersion block stores std relative to the mean, so the
  // whisker half-length in display units is dispersion * mean.
  std::vector<double> whiskers(n);
  for (std::size_t i = 0; i < n; ++i) whiskers[i] = std::abs(stds[i] * means[i]);
  double y_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y_max = std::max(y_max, means[i] + whiskers[i]);
  }
  if (y_max <= 0.0) y_max = 1.0;  // all-zero centroid still renders
  const double y_base = kTop + plot_h;
  auto y_of = [&](double v) { return y_base - plot_h * (v / y_max); };
  const double slot = plot_w / static_cast<double>(n);
  const double bar_w = slot * 0.8;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
         "width=\"640\" height=\"240\" viewBox=\"0 0 640 240\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"240\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kTop)
      << "\" x2=\"" << fixed2(kLeft) << "\" y2=\"" << fixed2(y_base)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(y_base)
      << "\" x2=\"" << fixed2(kWidth - kRight) << "\" y2=\"" << fixed2(y_base)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"4\" y=\"" << fixed2(kTop + 4.0)
      << "\" font-size=\"10\">" << general3(y_max) << "</text>\n";
  svg << "<text x=\"4\" y=\"" << fixed2(y_base)
      << "\" font-size=\"10\">0</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = kLeft + slot * static_cast<double>(i) + (slot - bar_w) / 2.0;
    const double value = std::max(0.0, means[i]);
    const double y_top = y_of(value);
    svg << "<rect x=\"" << fixed2(x0) << "\" y=\"" << fixed2(y_top)
        << "\" width=\"" << fixed2(bar_w) << "\" height=\""
        << fixed2(y_base - y_top) << "\" fill=\"#4a7ebb\"/>\n";
    if (whiskers[i] > 0.0) {
      const double x_mid = x0 + bar_w / 2.0;
      const double w_lo = std::max(0.0, means[i] - whiskers[i]);
      const double w_hi = means[i] + whiskers[i];
      svg << "<line x1=\"" << fixed2(x_mid) << "\" y1=\"" << fixed2(y_of(w_lo))
          << "\" x2=\"" << fixed2(x_mid) << "\" y2=\"" << fixed2(y_of(w_hi))
          << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    }
    if (n <= 64 && (i % 8 == 0 || i + 1 == n)) {
      svg << "<text x=\"" << fixed2(x0) << "\" y=\"" << fixed2(y_base + 14.0)
          << "\" font-size=\"10\">" << i << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace soundtex
