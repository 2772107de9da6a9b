// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pcenflux/error.hpp"
#include "pcenflux/types.hpp"

namespace pcenflux {

static_assert(std::endian::native == std::endian::little,
              "WAV and PCNS readers assume a little-endian host");

namespace detail {

template <typename T>
T read_le(std::istream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw IoError("unexpected end of file in '" + path + "'");
  return v;
}

template <typename T>
void write_le(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace detail

/// Reads a mono PCM WAV: 16-bit integer or 32-bit IEEE float samples.
/// Multichannel input is rejected, not downmixed.
inline Waveform read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open WAV file '" + path + "'");

  char tag[4];
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "RIFF", 4) != 0)
    throw IoError("'" + path + "' is not a RIFF file");
  detail::read_le<std::uint32_t>(is, path);  // overall size, unused
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "WAVE", 4) != 0)
    throw IoError("'" + path + "' is not a WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::vector<char> data;

  while (is.read(tag, 4)) {
    const auto chunk_size = detail::read_le<std::uint32_t>(is, path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw IoError("'" + path + "': fmt chunk too small");
      format = detail::read_le<std::uint16_t>(is, path);
      channels = detail::read_le<std::uint16_t>(is, path);
      sample_rate = detail::read_le<std::uint32_t>(is, path);
      detail::read_le<std::uint32_t>(is, path);  // byte rate
      detail::read_le<std::uint16_t>(is, path);  // block align
      bits = detail::read_le<std::uint16_t>(is, path);
      is.ignore(chunk_size - 16);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(chunk_size);
      is.read(data.data(), chunk_size);
      if (!is) throw IoError("'" + path + "': truncated data chunk");
    } else {
      is.ignore(chunk_size);
    }
    if (chunk_size % 2 == 1) is.ignore(1);  // chunks are word-aligned
  }

  if (!have_fmt) throw IoError("'" + path + "': missing fmt chunk");
  if (channels != 1)
    throw IoError("'" + path + "' has " + std::to_string(channels) +
                  " channels; only mono input is supported (no downmixing)");
  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32)
    throw IoError("'" + path + "': unsupported sample format (format tag " +
                  std::to_string(format) + ", " + std::to_string(bits) +
                  " bits); expected 16-bit PCM or 32-bit float");
  if (sample_rate == 0) throw IoError("'" + path + "': zero sample rate");

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  if (pcm16) {
    const std::size_t n = data.size() / 2;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t s;
      std::memcpy(&s, data.data() + 2 * i, 2);
      w.samples[i] = static_cast<double>(s) / 32768.0;
    }
  } else {
    const std::size_t n = data.size() / 4;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float s;
      std::memcpy(&s, data.data() + 4 * i, 4);
      w.samples[i] = static_cast<double>(s);
    }
  }
  return w;
}

namespace detail {

inline void write_wav_header(std::ostream& os, std::uint16_t format, std::uint16_t bits,
                             std::uint32_t sample_rate, std::uint32_t n_samples) {
  const std::uint16_t block_align = static_cast<std::uint16_t>(bits / 8);
  const std::uint32_t data_bytes = n_samples * block_align;
  const bool with_fact = format == 3;
  const std::uint32_t riff_size = 4 + (8 + 16) + (with_fact ? 8 + 4 : 0) + 8 + data_bytes;
  os.write("RIFF", 4);
  write_le<std::uint32_t>(os, riff_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_le<std::uint32_t>(os, 16);
  write_le<std::uint16_t>(os, format);
  write_le<std::uint16_t>(os, 1);  // mono
  write_le<std::uint32_t>(os, sample_rate);
  write_le<std::uint32_t>(os, sample_rate * block_align);
  write_le<std::uint16_t>(os, block_align);
  write_le<std::uint16_t>(os, bits);
  if (with_fact) {
    os.write("fact", 4);
    write_le<std::uint32_t>(os, 4);
    write_le<std::uint32_t>(os, n_samples);
  }
  os.write("data", 4);
  write_le<std::uint32_t>(os, data_bytes);
}

}  // namespace detail

/// 32-bit float mono WAV; doubles are narrowed to float, no rescaling.
inline void write_wav_float32(const std::string& path, const Waveform& w) {
  validate(w);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  detail::write_wav_header(os, 3, 32, static_cast<std::uint32_t>(w.sample_rate),
                           static_cast<std::uint32_t>(w.samples.size()));
  for (double v : w.samples) detail::write_le<float>(os, static_cast<float>(v));
  if (!os.good()) throw IoError("failed writing '" + path + "'");
}

/// 16-bit integer mono WAV; samples are scaled by 32768 and clipped to the
/// representable range, mirroring the reader's /32768 convention.
inline void write_wav_pcm16(const std::string& path, const Waveform& w) {
  validate(w);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  detail::write_wav_header(os, 1, 16, static_cast<std::uint32_t>(w.sample_rate),
                           static_cast<std::uint32_t>(w.samples.size()));
  for (double v : w.samples) {
    const double scaled = std::max(-32768.0, std::min(32767.0, std::rint(v * 32768.0)));
    detail::write_le<std::int16_t>(os, static_cast<std::int16_t>(scaled));
  }
  if (!os.good()) throw IoError("failed writing '" + path + "'");
}

}  // namespace pcenflux
