// src/wave-io.cc

// Copyright 2026  The olsad Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "olsad/wave-io.h"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include "olsad/common.h"

namespace olsad {

namespace {

uint32_t ReadU32(const std::string &b, size_t pos) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[pos])) |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 3])) << 24;
}

uint16_t ReadU16(const std::string &b, size_t pos) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[pos]) |
                               static_cast<uint8_t>(b[pos + 1]) << 8);
}

void PutU32(std::string *b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *b, uint16_t v) {
  b->push_back(static_cast<char>(v & 0xff));
  b->push_back(static_cast<char>(v >> 8));
}

}  // namespace

AudioStream ParseWav(const std::string &bytes, const std::string &name) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    throw DataError(name + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  int sample_rate = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t size = ReadU32(bytes, pos + 4);
    const size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > bytes.size())
        throw DataError(name + ": truncated fmt chunk");
      const uint16_t format = ReadU16(bytes, body);
      const uint16_t channels = ReadU16(bytes, body + 2);
      sample_rate = static_cast<int>(ReadU32(bytes, body + 4));
      const uint16_t bits = ReadU16(bytes, body + 14);
      if (format != 1)
        throw DataError(name + ": unsupported encoding (format code " +
                        std::to_string(format) + ", expected PCM 1)");
      if (channels != 1)
        throw DataError(name + ": multi-channel input (" +
                        std::to_string(channels) + " channels, expected mono)");
      if (bits != 16)
        throw DataError(name + ": unsupported bit depth (" +
                        std::to_string(bits) + " bits, expected 16)");
      if (sample_rate < kMinSampleRate)
        throw DataError(name + ": unsupported sample rate (" +
                        std::to_string(sample_rate) + " Hz, minimum " +
                        std::to_string(kMinSampleRate) + ")");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DataError(name + ": data chunk before fmt chunk");
      if (size == 0) throw DataError(name + ": empty stream (no sample data)");
      const size_t available = bytes.size() - body;
      if (available < size)
        throw DataError(name + ": truncated file (header declares " +
                        std::to_string(size) + " data bytes, found " +
                        std::to_string(available) + ")");
      if (size % 2 != 0)
        throw DataError(name + ": odd data chunk size for 16-bit samples");
      AudioStream audio;
      audio.sample_rate = sample_rate;
      audio.samples.resize(size / 2);
      for (size_t i = 0; i < audio.samples.size(); ++i) {
        const auto v = static_cast<int16_t>(ReadU16(bytes, body + 2 * i));
        audio.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw DataError(name + ": missing fmt chunk");
  throw DataError(name + ": missing data chunk");
}

AudioStream ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return ParseWav(bytes, path);
}

std::string EncodeWav(const AudioStream &audio) {
  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  PutU32(&b, 36 + data_bytes);
  b += "WAVE";
  b += "fmt ";
  PutU32(&b, 16);
  PutU16(&b, 1);
  PutU16(&b, 1);
  PutU32(&b, static_cast<uint32_t>(audio.sample_rate));
  PutU32(&b, static_cast<uint32_t>(audio.sample_rate * 2));
  PutU16(&b, 2);
  PutU16(&b, 16);
  b += "data";
  PutU32(&b, data_bytes);
  for (double s : audio.samples) {
    double v = std::nearbyint(s * 32768.0);
    if (v > 32767.0) v = 32767.0;
    if (v < -32768.0) v = -32768.0;
    PutU16(&b, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  return b;
}

void WriteWav(const AudioStream &audio, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  const std::string bytes = EncodeWav(audio);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path + ": write failed");
}

}  // namespace olsad
