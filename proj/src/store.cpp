// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "soundtex/errors.hpp"

namespace soundtex {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'T', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeFloat32 = 1;
constexpr std::size_t kHeaderSize = 28;

void push_u32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  out->push_back(static_cast<std::uint8_t>(v & 0xFF));
  out->push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out->push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out->push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void push_u64(std::vector<std::uint8_t>* out, std::uint64_t v) {
  push_u32(out, static_cast<std::uint32_t>(v & 0xFFFFFFFFull));
  push_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t read_u64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(read_u32(p)) |
         (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
}

}  // namespace

Matrix widen(const FloatMatrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    out.data[i] = static_cast<double>(m.data[i]);
  }
  return out;
}

FloatMatrix narrow(const Matrix& m) {
  FloatMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    out.data[i] = static_cast<float>(m.data[i]);
  }
  return out;
}

std::vector<std::uint8_t> encode_store(const FeatureStore& store) {
  const FloatMatrix& m = store.features;
  if (store.ids.size() != m.rows) {
    throw InvalidInputError("store: id count does not match row count");
  }
  if (m.cols == 0) throw InvalidInputError("store: zero-dimensional rows");
  if (m.cols > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInputError("store: dimension too large");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + m.data.size() * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  push_u32(&out, kVersion);
  push_u64(&out, static_cast<std::uint64_t>(m.rows));
  push_u32(&out, static_cast<std::uint32_t>(m.cols));
  push_u32(&out, kDtypeFloat32);
  push_u32(&out, 0);  // reserved
  for (float v : m.data) {
    push_u32(&out, std::bit_cast<std::uint32_t>(v));
  }
  for (const RowId& id : store.ids) {
    if (id.clip_id.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw InvalidInputError("store: clip id too long");
    }
    push_u32(&out, static_cast<std::uint32_t>(id.clip_id.size()));
    out.insert(out.end(), id.clip_id.begin(), id.clip_id.end());
    push_u32(&out, id.window_index);
  }
  return out;
}

FeatureStore decode_store(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize) throw ParseError("store: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError("store: magic mismatch");
  }
  const std::uint32_t version = read_u32(bytes.data() + 4);
  if (version != kVersion) {
    throw ParseError("store: version mismatch: file has " +
                     std::to_string(version) + ", reader supports " +
                     std::to_string(kVersion));
  }
  const std::uint64_t rows = read_u64(bytes.data() + 8);
  const std::uint32_t dim = read_u32(bytes.data() + 16);
  const std::uint32_t dtype = read_u32(bytes.data() + 20);
  if (dtype != kDtypeFloat32) throw ParseError("store: unsupported dtype tag");
  if (dim == 0) throw ParseError("store: zero dimension");
  if (rows > (std::numeric_limits<std::uint64_t>::max() / 4) / dim ||
      rows * static_cast<std::uint64_t>(dim) * 4 >
          std::numeric_limits<std::size_t>::max() - kHeaderSize) {
    throw ParseError("store: payload size overflow");
  }
  const std::size_t payload =
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(dim) * 4;
  if (bytes.size() < kHeaderSize + payload) {
    throw ParseError("store: truncated payload");
  }
  FeatureStore store;
  store.features = FloatMatrix(static_cast<std::size_t>(rows), dim);
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (std::size_t i = 0; i < store.features.data.size(); ++i) {
    store.features.data[i] = std::bit_cast<float>(read_u32(p + i * 4));
  }
  std::size_t pos = kHeaderSize + payload;
  store.ids.resize(static_cast<std::size_t>(rows));
  for (std::uint64_t r = 0; r < rows; ++r) {
    if (pos + 4 > bytes.size()) throw ParseError("store: truncated trailer");
    const std::uint32_t id_len = read_u32(bytes.data() + pos);
    pos += 4;
    if (pos + id_len + 4 > bytes.size()) throw ParseError("store: truncated trailer");
    RowId& id = store.ids[static_cast<std::size_t>(r)];
    id.clip_id.assign(reinterpret_cast<const char*>(bytes.data() + pos), id_len);
    pos += id_len;
    id.window_index = read_u32(bytes.data() + pos);
    pos += 4;
  }
  if (pos != bytes.size()) throw ParseError("store: unexpected trailing bytes");
  return store;
}

void write_store(const std::string& path, const FeatureStore& store) {
  const std::vector<std::uint8_t> bytes = encode_store(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("store: cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("store: write failure on " + path);
}

FeatureStore read_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("store: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("store: read failure on " + path);
  return decode_store(bytes);
}

}  // namespace soundtex
