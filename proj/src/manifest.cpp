// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/manifest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "soundtex/errors.hpp"
#include "soundtex/rng.hpp"

namespace soundtex {

namespace {

using nlohmann::json;

constexpr double kCenterSlack = 1e-9;  // tolerate rounding in stored centers

ManifestRecord parse_record(const json& obj, std::size_t line_no,
                            double window_s) {
  auto fail = [line_no](const std::string& why) -> ParseError {
    return ParseError("manifest line " + std::to_string(line_no) + ": " + why);
  };
  if (!obj.is_object()) throw fail("expected a JSON object");
  ManifestRecord record;
  if (!obj.contains("clip_id") || !obj["clip_id"].is_string()) {
    throw fail("missing string field clip_id");
  }
  record.clip_id = obj["clip_id"].get<std::string>();
  if (record.clip_id.empty()) throw fail("empty clip_id");
  if (!obj.contains("path") || !obj["path"].is_string()) {
    throw fail("missing string field path");
  }
  record.path = obj["path"].get<std::string>();
  if (!obj.contains("duration_s") || !obj["duration_s"].is_number()) {
    throw fail("missing numeric field duration_s");
  }
  record.duration_s = obj["duration_s"].get<double>();
  if (!(record.duration_s >= 0.0) || !std::isfinite(record.duration_s)) {
    throw fail("duration_s must be finite and nonnegative");
  }
  if (obj.contains("window_centers_s")) {
    const json& centers = obj["window_centers_s"];
    if (!centers.is_array()) throw fail("window_centers_s must be an array");
    const double half = window_s / 2.0;
    for (const json& c : centers) {
      if (!c.is_number()) throw fail("window_centers_s entries must be numbers");
      const double value = c.get<double>();
      if (value - half < -kCenterSlack ||
          value + half > record.duration_s + kCenterSlack) {
        std::ostringstream msg;
        msg << "window center " << value << " does not fit in clip of "
            << record.duration_s << " s";
        throw fail(msg.str());
      }
      record.window_centers_s.push_back(value);
    }
  }
  return record;
}

}  // namespace

std::vector<ManifestRecord> parse_manifest(const std::string& text) {
  std::vector<ManifestRecord> records;
  std::set<std::string> seen;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;  // blank line
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    ManifestRecord record = parse_record(obj, line_no, 3.75);
    if (!seen.insert(record.clip_id).second) {
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": duplicate clip_id \"" + record.clip_id + "\"");
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ManifestRecord> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("manifest: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("manifest: read failure on " + path);
  return parse_manifest(buffer.str());
}

std::vector<double> sample_windows(double duration_s, int n, std::uint64_t seed,
                                   double window_s) {
  if (n < 0) throw InvalidConfigError("sample_windows: negative count");
  if (!(window_s > 0.0)) throw InvalidConfigError("sample_windows: window must be positive");
  if (!std::isfinite(duration_s) || duration_s < 0.0) {
    throw InvalidInputError("sample_windows: bad duration");
  }
  const double half = window_s / 2.0;
  if (duration_s < window_s || n == 0) return {};
  Rng rng(seed);
  std::vector<double> centers(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    centers[static_cast<std::size_t>(i)] = rng.uniform(half, duration_s - half);
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

}  // namespace soundtex
