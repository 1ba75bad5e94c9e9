// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_STORE_HPP_
#define SOUNDTEX_STORE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "soundtex/matrix.hpp"

namespace soundtex {

// Dense row-major matrix of float32 feature rows.
struct FloatMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  FloatMatrix() = default;
  FloatMatrix(std::size_t r, std::size_t c, float fill = 0.0f)
      : rows(r), cols(c), data(r * c, fill) {}

  float* row(std::size_t i) { return data.data() + i * cols; }
  const float* row(std::size_t i) const { return data.data() + i * cols; }
};

Matrix widen(const FloatMatrix& m);
FloatMatrix narrow(const Matrix& m);

// Identifies the clip and analysis window a feature row came from.
struct RowId {
  std::string clip_id;
  std::uint32_t window_index = 0;

  bool operator==(const RowId&) const = default;
};

struct FeatureStore {
  FloatMatrix features;
  std::vector<RowId> ids;  // one per row
};

// Binary feature store layout (all integers little-endian):
//   28-byte header: magic "ASTX", u32 version (1), u64 row count,
//   u32 dim, u32 dtype tag (1 = float32), u32 reserved (0);
//   then row-major float32 payload;
//   then one trailer entry per row: u32 id length, UTF-8 id bytes,
//   u32 window index.
// Serialization is byte-oriented, so files are identical across hosts.
void write_store(const std::string& path, const FeatureStore& store);
FeatureStore read_store(const std::string& path);

std::vector<std::uint8_t> encode_store(const FeatureStore& store);
FeatureStore decode_store(const std::vector<std::uint8_t>& bytes);

}  // namespace soundtex

#endif  // SOUNDTEX_STORE_HPP_
