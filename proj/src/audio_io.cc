// src/audio_io.cc

// Copyright 2026  The posm Authors
//
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

#include "posm/audio_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace posm {

namespace le {

void put_u16(std::vector<unsigned char> &out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
}

void put_f32(std::vector<unsigned char> &out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint16_t get_u16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const unsigned char *p) { return std::bit_cast<float>(get_u32(p)); }

std::vector<unsigned char> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string &path, const std::vector<unsigned char> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace le

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

}  // namespace

TimeSignal read_wav(const std::string &path) {
  const auto bytes = le::read_file(path);
  if (bytes.size() < 12) throw IoError("truncated or empty WAV file: " + path);
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const std::uint32_t size = le::get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw IoError("truncated fmt chunk: " + path);
      format = le::get_u16(bytes.data() + body);
      channels = le::get_u16(bytes.data() + body + 2);
      rate = le::get_u32(bytes.data() + body + 4);
      bits = le::get_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26)
        format = le::get_u16(bytes.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + size > bytes.size()) throw IoError("truncated data chunk: " + path);
      data = bytes.data() + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw IoError("missing fmt chunk: " + path);
  if (!data) throw IoError("missing data chunk: " + path);
  if (channels == 0) throw IoError("WAV declares zero channels: " + path);

  std::size_t width = 0;
  if (format == kFormatPcm && bits == 16) {
    width = 2;
  } else if (format == kFormatFloat && bits == 32) {
    width = 4;
  } else {
    throw IoError("unsupported WAV sample format tag " + std::to_string(format) + " with " +
                  std::to_string(bits) + " bits: " + path);
  }
  const std::size_t frame_bytes = width * channels;
  if (data_size % frame_bytes != 0) throw IoError("truncated sample data: " + path);
  const std::size_t n = data_size / frame_bytes;

  TimeSignal out(channels, n, static_cast<int>(rate));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t m = 0; m < channels; ++m) {
      const unsigned char *p = data + t * frame_bytes + m * width;
      out.channels[m][t] = width == 2
                               ? static_cast<std::int16_t>(le::get_u16(p)) / 32768.0
                               : static_cast<double>(le::get_f32(p));
    }
  return out;
}

std::size_t write_wav(const TimeSignal &signal, const WavSpec &spec, const std::string &path) {
  signal.validate();
  if (spec.channel_count < 1) throw InvalidArgument("WAV channel count must be >= 1");
  if (signal.channel_count() != spec.channel_count)
    throw InvalidArgument("signal channel count does not match WAV spec");

  const std::size_t n = signal.length();
  const std::uint16_t channels = static_cast<std::uint16_t>(spec.channel_count);
  const bool is_float = spec.sample_format == SampleFormat::float32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint32_t block_align = channels * (bits / 8u);
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * block_align);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  le::put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  le::put_u32(out, 16);
  le::put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  le::put_u16(out, channels);
  le::put_u32(out, static_cast<std::uint32_t>(spec.sample_rate_hz));
  le::put_u32(out, static_cast<std::uint32_t>(spec.sample_rate_hz) * block_align);
  le::put_u16(out, static_cast<std::uint16_t>(block_align));
  le::put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  le::put_u32(out, data_size);

  std::size_t clipped = 0;
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t m = 0; m < channels; ++m) {
      double v = signal.channels[m][t];
      if (v > 1.0 || v < -1.0) {
        ++clipped;
        v = std::clamp(v, -1.0, 1.0);
      }
      if (is_float) {
        le::put_f32(out, static_cast<float>(v));
      } else {
        const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        le::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      }
    }
  le::write_file(path, out);
  return clipped;
}

namespace {

constexpr char kVarianceMagic[4] = {'P', 'S', 'M', '1'};
constexpr double kReadFloor = 1e-12;

}  // namespace

std::vector<VarianceField> read_variance_file(const std::string &path) {
  const auto bytes = le::read_file(path);
  if (bytes.size() < 16) throw IoError("truncated variance file: " + path);
  if (std::memcmp(bytes.data(), kVarianceMagic, 4) != 0)
    throw IoError("bad variance file magic: " + path);
  VarianceFileHeader h;
  h.n_sources = le::get_u32(bytes.data() + 4);
  h.n_freq = le::get_u32(bytes.data() + 8);
  h.n_frames = le::get_u32(bytes.data() + 12);
  if (h.n_sources == 0 || h.n_freq == 0 || h.n_frames == 0)
    throw IoError("variance file dimensions must be >= 1: " + path);
  const std::size_t count =
      static_cast<std::size_t>(h.n_sources) * h.n_freq * h.n_frames;
  if (bytes.size() != 16 + 4 * count)
    throw IoError("variance file payload size does not match header: " + path);

  std::vector<VarianceField> fields;
  const unsigned char *p = bytes.data() + 16;
  for (std::uint32_t n = 0; n < h.n_sources; ++n) {
    RealMatrix r(h.n_freq, h.n_frames);
    for (auto &v : r.data()) {
      const double x = le::get_f32(p);
      p += 4;
      v = (std::isfinite(x) && x > kReadFloor) ? x : kReadFloor;
    }
    fields.push_back({std::move(r), VarianceKind::estimator});
  }
  return fields;
}

void write_variance_file(const std::vector<VarianceField> &fields, const std::string &path) {
  if (fields.empty()) throw InvalidArgument("no variance fields to write");
  const auto &first = fields.front().r;
  for (const auto &f : fields)
    if (!f.r.same_shape(first)) throw InvalidArgument("variance fields differ in shape");
  std::vector<unsigned char> out(kVarianceMagic, kVarianceMagic + 4);
  le::put_u32(out, static_cast<std::uint32_t>(fields.size()));
  le::put_u32(out, static_cast<std::uint32_t>(first.rows()));
  le::put_u32(out, static_cast<std::uint32_t>(first.cols()));
  for (const auto &f : fields)
    for (double v : f.r.data()) le::put_f32(out, static_cast<float>(v));
  le::write_file(path, out);
}

}  // namespace posm
