// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <string>

#include "pcenflux/error.hpp"
#include "pcenflux/types.hpp"

namespace pcenflux {

/// The five-parameter adaptive gain control configuration.
/// r = 0 selects the analytic limit form of the compression, see pcen().
struct PcenParams {
  double s = 0.09;       // smoothing coefficient, (0, 1]
  double epsilon = 0.0;  // floor added to the smoothed denominator
  double alpha = 1.0;    // gain exponent
  double delta = 1.0;    // bias
  double r = 0.0;        // root exponent
};

inline void validate(const PcenParams& p) {
  if (!(p.s > 0.0 && p.s <= 1.0))
    throw ConfigError("smoothing coefficient s must be in (0, 1], got " + std::to_string(p.s));
  if (p.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (p.alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (p.delta < 0.0) throw ConfigError("delta must be >= 0");
  if (p.r < 0.0) throw ConfigError("r must be >= 0");
  if (p.r == 0.0 && p.delta == 0.0)
    throw ConfigError("r = 0 requires delta > 0 (the limit form is undefined at delta = 0)");
}

/// First-order IIR smoother along time:
///   M[0, f] = E[0, f],  M[t, f] = s * E[t-1, f] + (1 - s) * M[t-1, f].
/// Strictly causal for t >= 1: M[t] depends on E only up to index t-1.
inline Matrix smooth(const Matrix& E, double s) {
  if (!(s > 0.0 && s <= 1.0))
    throw ConfigError("smoothing coefficient s must be in (0, 1], got " + std::to_string(s));
  Matrix M(E.rows, E.cols);
  if (E.rows == 0) return M;
  for (std::size_t f = 0; f < E.cols; ++f) M(0, f) = E(0, f);
  for (std::size_t t = 1; t < E.rows; ++t)
    for (std::size_t f = 0; f < E.cols; ++f)
      M(t, f) = s * E(t - 1, f) + (1.0 - s) * M(t - 1, f);
  return M;
}

namespace detail {

[[noreturn]] inline void throw_zero_divisor(std::size_t t, std::size_t f) {
  throw NumericError("zero gain-control denominator at t=" + std::to_string(t) +
                     ", f=" + std::to_string(f) + " (epsilon = 0 and M = 0)");
}

}  // namespace detail

/// Adaptive gain control with root compression:
///   (1/r) * (E / (eps + M)^alpha + delta)^r - delta^r / r        for r > 0,
///   log(delta + E / (eps + M)^alpha) - log(delta)                for r = 0,
/// the latter being the exact r -> 0 limit of the former.
inline Matrix pcen(const Matrix& E, const PcenParams& p) {
  validate(p);
  const Matrix M = smooth(E, p.s);
  Matrix out(E.rows, E.cols);
  const double log_delta = p.r == 0.0 ? std::log(p.delta) : 0.0;
  const double delta_pow_r = p.r > 0.0 ? std::pow(p.delta, p.r) : 0.0;
  for (std::size_t t = 0; t < E.rows; ++t) {
    for (std::size_t f = 0; f < E.cols; ++f) {
      const double denom_base = p.epsilon + M(t, f);
      double gained;
      if (p.alpha == 0.0) {
        gained = E(t, f);
      } else {
        if (denom_base <= 0.0) detail::throw_zero_divisor(t, f);
        gained = E(t, f) / std::pow(denom_base, p.alpha);
      }
      out(t, f) = p.r == 0.0
                      ? std::log(p.delta + gained) - log_delta
                      : (std::pow(gained + p.delta, p.r) - delta_pow_r) / p.r;
    }
  }
  return out;
}

/// Smooth counterpart of rectified log flux:
///   log(E[t, f] + E[t-1, f]) - log(E[t-1, f])  for t >= 1, zeros at t = 0.
/// This is the joint limit of pcen() at (s, epsilon, alpha, r) -> (1, 0, 1, 0).
inline Matrix softplus_flux(const Matrix& E) {
  Matrix out(E.rows, E.cols, 0.0);
  for (std::size_t t = 1; t < E.rows; ++t) {
    for (std::size_t f = 0; f < E.cols; ++f) {
      const double prev = E(t - 1, f);
      if (!(prev > 0.0))
        throw NumericError("softplus flux needs a positive predecessor magnitude at t=" +
                           std::to_string(t) + ", f=" + std::to_string(f));
      out(t, f) = std::log(E(t, f) + prev) - std::log(prev);
    }
  }
  return out;
}

/// Approximate mapping from an averaging time scale to a smoothing
/// coefficient: s = 1 - exp(-1 / (T * frame_rate)). The coefficient s is
/// always the authoritative parameter; this is a convenience only.
inline double s_from_time(double t_sec, double frame_rate) {
  if (!(t_sec > 0.0) || !(frame_rate > 0.0))
    throw ConfigError("s_from_time needs positive time scale and frame rate");
  return 1.0 - std::exp(-1.0 / (t_sec * frame_rate));
}

}  // namespace pcenflux
