// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace pcenflux::fft {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 DIT transform. size must be a power of two.
/// inverse applies the conjugate transform without the 1/n factor.
inline void transform_pow2(std::vector<std::complex<double>>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (n < 2) return;
  // bit reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Forward DFT of arbitrary size, O(n^2). Fallback for non-power-of-two frames.
inline std::vector<std::complex<double>> dft_naive(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
      re += x[t] * std::cos(ang);
      im += x[t] * std::sin(ang);
    }
    out[k] = {re, im};
  }
  return out;
}

/// Magnitudes of the half spectrum (bins 0..n/2) of a real frame,
/// pre-multiplied by `window`. Output has n/2 + 1 entries.
inline void half_spectrum_magnitude(std::span<const double> frame,
                                    std::span<const double> window,
                                    std::vector<std::complex<double>>& scratch,
                                    std::vector<double>& out) {
  const std::size_t n = frame.size();
  out.resize(n / 2 + 1);
  if (is_power_of_two(n)) {
    scratch.resize(n);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = {frame[i] * window[i], 0.0};
    transform_pow2(scratch);
    for (std::size_t k = 0; k <= n / 2; ++k) out[k] = std::abs(scratch[k]);
  } else {
    std::vector<double> windowed(n);
    for (std::size_t i = 0; i < n; ++i) windowed[i] = frame[i] * window[i];
    const auto spec = dft_naive(windowed);
    for (std::size_t k = 0; k <= n / 2; ++k) out[k] = std::abs(spec[k]);
  }
}

/// Zero-phase filtering of a whole signal: multiply the spectrum by a real
/// gain given per frequency (Hz). The signal is zero-padded to at least
/// twice its length to keep the circular wrap-around out of the result.
inline std::vector<double> apply_frequency_gain(
    std::span<const double> x, int sample_rate,
    const std::function<double(double)>& gain_of_hz) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t m = next_power_of_two(2 * n);
  std::vector<std::complex<double>> buf(m, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
  transform_pow2(buf);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double hz = static_cast<double>(k) * sample_rate / static_cast<double>(m);
    const double g = gain_of_hz(hz);
    buf[k] *= g;
    if (k != 0 && k != m / 2) buf[m - k] *= g;  // keep Hermitian symmetry
  }
  transform_pow2(buf, /*inverse=*/true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real() / static_cast<double>(m);
  return out;
}

}  // namespace pcenflux::fft
