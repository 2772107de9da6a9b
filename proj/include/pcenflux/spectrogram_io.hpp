// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "pcenflux/error.hpp"
#include "pcenflux/frontend.hpp"
#include "pcenflux/wav.hpp"  // little-endian helpers

namespace pcenflux {

// Binary spectrogram container, little-endian:
//   magic "PCNS" | version u32 | n_frames u32 | n_bands u32 | frame_rate f64
// followed by row-major f32 values.

inline constexpr std::uint32_t kPcnsVersion = 1;

struct PcnsSpectrogram {
  Matrix values;
  double frame_rate = 0.0;
};

inline void write_pcns(const std::string& path, const Matrix& values, double frame_rate) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write("PCNS", 4);
  detail::write_le<std::uint32_t>(os, kPcnsVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(values.rows));
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(values.cols));
  detail::write_le<double>(os, frame_rate);
  for (double v : values.data) detail::write_le<float>(os, static_cast<float>(v));
  if (!os.good()) throw IoError("failed writing '" + path + "'");
}

inline void write_pcns(const std::string& path, const Spectrogram& s) {
  write_pcns(path, s.values, s.frame_rate);
}

inline PcnsSpectrogram read_pcns(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open spectrogram container '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "PCNS", 4) != 0)
    throw IoError("'" + path + "' is not a PCNS container");
  const auto version = detail::read_le<std::uint32_t>(is, path);
  if (version != kPcnsVersion)
    throw IoError("'" + path + "': unsupported PCNS version " + std::to_string(version));
  const auto n_frames = detail::read_le<std::uint32_t>(is, path);
  const auto n_bands = detail::read_le<std::uint32_t>(is, path);
  PcnsSpectrogram out;
  out.frame_rate = detail::read_le<double>(is, path);
  out.values = Matrix(n_frames, n_bands);
  for (double& v : out.values.data)
    v = static_cast<double>(detail::read_le<float>(is, path));
  return out;
}

}  // namespace pcenflux
