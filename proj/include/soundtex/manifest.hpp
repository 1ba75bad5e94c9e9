// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_MANIFEST_HPP_
#define SOUNDTEX_MANIFEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace soundtex {

// One clip in a JSON-lines corpus manifest.
struct ManifestRecord {
  std::string clip_id;
  std::string path;
  double duration_s = 0.0;
  std::vector<double> window_centers_s;  // optional; empty means "sample them"
};

// Parses one JSON object per line; blank lines are skipped. Validates
// required fields, uniqueness of clip ids, and that every explicit
// window center admits a full analysis window inside the clip.
std::vector<ManifestRecord> load_manifest(const std::string& path);
std::vector<ManifestRecord> parse_manifest(const std::string& text);

// n window centers drawn uniformly from the span where a full window
// fits, sorted ascending. Returns fewer than n centers only when the
// clip is too short for any window (then none). Deterministic in
// (duration_s, n, seed).
std::vector<double> sample_windows(double duration_s, int n, std::uint64_t seed,
                                   double window_s = 3.75);

}  // namespace soundtex

#endif  // SOUNDTEX_MANIFEST_HPP_
