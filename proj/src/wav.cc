// src/wav.cc

// Copyright 2026  EmoAug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emoaug/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace emoaug {

namespace {

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8);
}

void WriteU32(std::ofstream& os, uint32_t v) {
  uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                  static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
  os.write(reinterpret_cast<char*>(b), 4);
}

void WriteU16(std::ofstream& os, uint16_t v) {
  uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
  os.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

Waveform LoadWaveform(const std::string& path, const WavLoadOptions& opts) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open WAV file: " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(is)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }

  // Walk chunks; require a PCM fmt chunk before data.
  size_t pos = 12;
  int channels = 0, sample_rate = 0, bits = 0;
  const uint8_t* data = nullptr;
  size_t data_len = 0;
  while (pos + 8 <= buf.size()) {
    uint32_t sz = ReadU32(buf.data() + pos + 4);
    const uint8_t* body = buf.data() + pos + 8;
    if (pos + 8 + sz > buf.size()) sz = static_cast<uint32_t>(buf.size() - pos - 8);
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (sz < 16) throw FormatError("truncated fmt chunk: " + path);
      uint16_t fmt = ReadU16(body);
      if (fmt != 1) throw FormatError("unsupported WAV encoding (want PCM): " + path);
      channels = ReadU16(body + 2);
      sample_rate = static_cast<int>(ReadU32(body + 4));
      bits = ReadU16(body + 14);
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data = body;
      data_len = sz;
    }
    pos += 8 + sz + (sz & 1);
  }
  if (channels <= 0 || data == nullptr)
    throw FormatError("missing fmt or data chunk: " + path);
  if (bits != 16) throw FormatError("unsupported bit depth (want 16): " + path);
  if (channels > 1 && !opts.allow_downmix)
    throw FormatError("multi-channel WAV with downmix disabled: " + path);

  size_t n_frames = data_len / (2 * channels);
  if (n_frames == 0) throw FormatError("empty WAV data chunk: " + path);

  Waveform x;
  x.sample_rate = sample_rate;
  x.samples.resize(n_frames);
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const uint8_t* p = data + 2 * (i * channels + c);
      int16_t s = static_cast<int16_t>(ReadU16(p));
      acc += s / 32768.0;
    }
    x.samples[i] = acc / channels;
  }

  if (sample_rate != opts.target_sample_rate) {
    if (!opts.allow_resample)
      throw FormatError("sample rate mismatch with resampling disabled: " + path);
    x = ResampleWaveform(x, opts.target_sample_rate);
  }
  return x;
}

void SaveWaveform(const std::string& path, const Waveform& x) {
  EMOAUG_CHECK(!x.samples.empty(), ContractError, "refusing to write empty waveform");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  uint32_t data_bytes = static_cast<uint32_t>(x.samples.size() * 2);
  os.write("RIFF", 4);
  WriteU32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteU32(os, 16);
  WriteU16(os, 1);  // PCM
  WriteU16(os, 1);  // mono
  WriteU32(os, static_cast<uint32_t>(x.sample_rate));
  WriteU32(os, static_cast<uint32_t>(x.sample_rate * 2));
  WriteU16(os, 2);
  WriteU16(os, 16);
  os.write("data", 4);
  WriteU32(os, data_bytes);
  for (double v : x.samples) {
    double c = std::clamp(v, -1.0, 1.0);
    int16_t s = static_cast<int16_t>(std::lround(c * 32767.0));
    WriteU16(os, static_cast<uint16_t>(s));
  }
  if (!os) throw IoError("short write: " + path);
}

Waveform ResampleWaveform(const Waveform& x, int new_rate) {
  EMOAUG_CHECK(new_rate > 0, ContractError, "resample rate must be positive");
  if (new_rate == x.sample_rate) return x;
  double ratio = static_cast<double>(x.sample_rate) / new_rate;
  int64_t n_out = std::llround(x.samples.size() / ratio);
  if (n_out < 1) n_out = 1;
  Waveform y;
  y.sample_rate = new_rate;
  y.samples.resize(n_out);
  int64_t n_in = x.NumSamples();
  for (int64_t i = 0; i < n_out; ++i) {
    double t = i * ratio;
    int64_t i0 = static_cast<int64_t>(t);
    if (i0 >= n_in - 1) {
      y.samples[i] = x.samples[n_in - 1];
    } else {
      double f = t - i0;
      y.samples[i] = (1.0 - f) * x.samples[i0] + f * x.samples[i0 + 1];
    }
  }
  return y;
}

}  // namespace emoaug
