// include/posm/audio_io.h

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

#ifndef POSM_AUDIO_IO_H_
#define POSM_AUDIO_IO_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "posm/model.h"
#include "posm/types.h"

namespace posm {

enum class SampleFormat { pcm16, float32 };

struct WavSpec {
  int sample_rate_hz = 8000;
  std::size_t channel_count = 1;
  SampleFormat sample_format = SampleFormat::float32;
};

/// Reads a RIFF/WAVE file holding PCM16 or IEEE float32 samples. PCM16 is
/// scaled by 1/32768.
TimeSignal read_wav(const std::string &path);

/// Writes a canonical 44-byte-header RIFF/WAVE file. Samples outside [-1, 1]
/// are clipped; the number of clipped samples is returned.
std::size_t write_wav(const TimeSignal &signal, const WavSpec &spec,
                      const std::string &path);

/// Variance file layout ("PSM1"): magic, u32 n_sources, u32 n_freq,
/// u32 n_frames, then little-endian float32 values in (source, freq, frame)
/// row-major order.
struct VarianceFileHeader {
  std::uint32_t n_sources = 0;
  std::uint32_t n_freq = 0;
  std::uint32_t n_frames = 0;
};

/// Values are floored at 1e-12 on read.
std::vector<VarianceField> read_variance_file(const std::string &path);
void write_variance_file(const std::vector<VarianceField> &fields,
                         const std::string &path);

namespace le {

// Little-endian scalar packing shared by the binary formats.
void put_u16(std::vector<unsigned char> &out, std::uint16_t v);
void put_u32(std::vector<unsigned char> &out, std::uint32_t v);
void put_f32(std::vector<unsigned char> &out, float v);
std::uint16_t get_u16(const unsigned char *p);
std::uint32_t get_u32(const unsigned char *p);
float get_f32(const unsigned char *p);

std::vector<unsigned char> read_file(const std::string &path);
void write_file(const std::string &path, const std::vector<unsigned char> &bytes);

}  // namespace le

}  // namespace posm

#endif  // POSM_AUDIO_IO_H_
