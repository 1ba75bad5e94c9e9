// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "soundtex/errors.hpp"

namespace soundtex {

namespace {

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(static_cast<std::uint32_t>(p[0]) |
                                    (static_cast<std::uint32_t>(p[1]) << 8));
}

bool tag_is(const std::uint8_t* p, const char* tag) {
  return std::memcmp(p, tag, 4) == 0;
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

double decode_sample(const std::uint8_t* p, std::uint16_t format,
                     std::uint16_t bits) {
  if (format == kFormatPcm && bits == 16) {
    const auto raw = static_cast<std::int16_t>(read_u16(p));
    return static_cast<double>(raw) / 32768.0;
  }
  if (format == kFormatPcm && bits == 24) {
    std::int32_t raw = static_cast<std::int32_t>(p[0]) |
                       (static_cast<std::int32_t>(p[1]) << 8) |
                       (static_cast<std::int32_t>(p[2]) << 16);
    if (raw & 0x800000) raw -= 0x1000000;  // sign extend
    return static_cast<double>(raw) / 8388608.0;
  }
  const float value = std::bit_cast<float>(read_u32(p));
  if (!std::isfinite(value)) throw ParseError("wav: non-finite float sample");
  return static_cast<double>(value);
}

}  // namespace

Waveform decode_wav(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) throw ParseError("wav: truncated header");
  if (!tag_is(bytes.data(), "RIFF")) throw ParseError("wav: bad container magic");
  if (!tag_is(bytes.data() + 8, "WAVE")) throw ParseError("wav: bad riff form type");

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* header = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32(header + 4);
    const std::size_t body = pos + 8;
    if (tag_is(header, "fmt ")) {
      if (chunk_size < 16 || body + chunk_size > bytes.size()) {
        throw ParseError("wav: truncated fmt chunk");
      }
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && chunk_size >= 40) {
        // The codec GUID of an extensible header starts with the
        // ordinary format tag.
        format = read_u16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (tag_is(header, "data")) {
      if (body + chunk_size > bytes.size()) {
        throw ParseError("wav: truncated data chunk");
      }
      data_offset = body;
      data_size = chunk_size;
      have_data = true;
    } else {
      if (body + chunk_size > bytes.size()) {
        throw ParseError("wav: truncated chunk");
      }
    }
    pos = body + chunk_size + (chunk_size % 2);  // chunks are word aligned
  }
  if (!have_fmt) throw ParseError("wav: missing fmt chunk");
  if (!have_data) throw ParseError("wav: missing data chunk");
  if (format != kFormatPcm && format != kFormatFloat) {
    throw ParseError("wav: unsupported codec");
  }
  if (format == kFormatPcm && bits != 16 && bits != 24) {
    throw ParseError("wav: unsupported bit depth");
  }
  if (format == kFormatFloat && bits != 32) {
    throw ParseError("wav: unsupported bit depth");
  }
  if (channels != 1 && channels != 2) {
    throw ParseError("wav: unsupported channel count");
  }
  if (rate == 0 || rate > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw ParseError("wav: invalid sample rate");
  }
  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  if (data_size % frame_size != 0) throw ParseError("wav: truncated data chunk");
  const std::size_t n_frames = data_size / frame_size;
  if (n_frames == 0) throw ParseError("wav: empty data chunk");

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(n_frames);
  const std::uint8_t* data = bytes.data() + data_offset;
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::uint8_t* frame = data + i * frame_size;
    double value = decode_sample(frame, format, bits);
    if (channels == 2) {
      value = 0.5 * (value + decode_sample(frame + bytes_per_sample, format, bits));
    }
    w.samples[i] = value;
  }
  return w;
}

Waveform decode_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("wav: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("wav: read failure on " + path);
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav_pcm16(const Waveform& w) {
  validate(w);
  const std::size_t n = w.samples.size();
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  auto push_tag = [&out](const char* tag) {
    out.insert(out.end(), tag, tag + 4);
  };
  auto push_u32 = [&out](std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
  };
  auto push_u16 = [&out](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  };
  push_tag("RIFF");
  push_u32(36 + data_size);
  push_tag("WAVE");
  push_tag("fmt ");
  push_u32(16);
  push_u16(kFormatPcm);
  push_u16(1);  // mono
  push_u32(static_cast<std::uint32_t>(w.sample_rate));
  push_u32(static_cast<std::uint32_t>(w.sample_rate) * 2);  // byte rate
  push_u16(2);   // block align
  push_u16(16);  // bits per sample
  push_tag("data");
  push_u32(data_size);
  for (double s : w.samples) {
    // Scale by the decoder's 32768 so values round-trip within half a
    // step; +1.0 alone saturates at the largest representable code.
    const double clamped = std::min(1.0, std::max(-1.0, s));
    const long q = std::lround(clamped * 32768.0);
    const auto code = static_cast<std::int16_t>(std::min(q, 32767L));
    push_u16(static_cast<std::uint16_t>(code));
  }
  return out;
}

void write_wav_pcm16(const std::string& path, const Waveform& w) {
  const std::vector<std::uint8_t> bytes = encode_wav_pcm16(w);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("wav: cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("wav: write failure on " + path);
}

}  // namespace soundtex
