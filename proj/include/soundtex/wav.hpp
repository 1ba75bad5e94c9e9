// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_WAV_HPP_
#define SOUNDTEX_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "soundtex/waveform.hpp"

namespace soundtex {

// Decodes a RIFF/WAVE byte buffer. Accepts 16- and 24-bit PCM and
// 32-bit IEEE float, mono or stereo; stereo is downmixed by averaging
// the two channels. Integer samples map to [-1, 1) by dividing by
// 32768 or 8388608. Throws ParseError with a distinct message per
// failure mode.
Waveform decode_wav(const std::vector<std::uint8_t>& bytes);

// Reads the file and decodes it; throws IoError when unreadable.
Waveform decode_wav_file(const std::string& path);

// Writes mono 16-bit PCM; samples are clamped to [-1, 1] and rounded.
void write_wav_pcm16(const std::string& path, const Waveform& w);

// Encodes without touching the filesystem.
std::vector<std::uint8_t> encode_wav_pcm16(const Waveform& w);

}  // namespace soundtex

#endif  // SOUNDTEX_WAV_HPP_
