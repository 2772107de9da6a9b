// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "pcenflux/error.hpp"

namespace pcenflux {

/// Dense row-major matrix of doubles. All spectrogram-shaped data
/// ((n_frames x n_bands)) flows through this type; internal math is
/// always double precision.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  /// Largest entry; 0 for an empty matrix.
  double max_value() const {
    if (data.empty()) return 0.0;
    return *std::max_element(data.begin(), data.end());
  }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

/// Discrete-time mono audio, full-scale +-1.0 amplitudes.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_sec() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

inline void validate(const Waveform& w) {
  if (w.sample_rate <= 0) throw ConfigError("waveform sample_rate must be positive");
}

}  // namespace pcenflux
