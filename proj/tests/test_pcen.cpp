// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "pcenflux/pcen.hpp"
#include "pcenflux/synthesis.hpp"  // deterministic generator

using namespace pcenflux;

namespace {

Matrix random_positive(std::size_t rows, std::size_t cols, std::uint64_t seed,
                       double lo = 0.1, double hi = 10.0) {
  rng::Generator gen(seed);
  Matrix m(rows, cols);
  for (double& v : m.data) v = lo + (hi - lo) * gen.next_double();
  return m;
}

Matrix constant(std::size_t rows, std::size_t cols, double c) {
  return Matrix(rows, cols, c);
}

double max_abs_dev_from_row1(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double dev = 0.0;
  for (std::size_t t = 1; t < a.rows; ++t)
    for (std::size_t f = 0; f < a.cols; ++f)
      dev = std::max(dev, std::abs(a(t, f) - b(t, f)));
  return dev;
}

}  // namespace

// ---------------------------------------------------------------------------
// smoother
// ---------------------------------------------------------------------------

TEST_CASE("s = 1 degenerates to the previous frame") {
  const Matrix E = random_positive(20, 4, 1);
  const Matrix M = smooth(E, 1.0);
  for (std::size_t f = 0; f < E.cols; ++f) REQUIRE(M(0, f) == E(0, f));
  for (std::size_t t = 1; t < E.rows; ++t)
    for (std::size_t f = 0; f < E.cols; ++f) REQUIRE(M(t, f) == E(t - 1, f));
}

TEST_CASE("a constant spectrogram is a fixed point of the smoother") {
  const Matrix E = constant(64, 3, 4.25);
  for (double s : {0.09, 0.33, 0.5, 1.0}) {
    const Matrix M = smooth(E, s);
    for (double v : M.data) REQUIRE(v == Approx(4.25).epsilon(1e-12));
  }
}

TEST_CASE("alternating input converges to the geometric closed form") {
  // one band alternating A, 0; derived: M at loud frames -> A(1-s)/(2-s)
  const double A = 3.0;
  for (double s : {0.09, 0.33, 0.5}) {
    const std::size_t warmup = static_cast<std::size_t>(std::ceil(50.0 / s));
    const std::size_t rows = 2 * warmup + 64;
    Matrix E(rows, 1, 0.0);
    for (std::size_t t = 0; t < rows; t += 2) E(t, 0) = A;  // even frames loud
    const Matrix M = smooth(E, s);
    const double expected = A * (1.0 - s) / (2.0 - s);
    for (std::size_t t = warmup + (warmup % 2); t < rows; t += 2)
      REQUIRE(M(t, 0) == Approx(expected).epsilon(1e-6));

    // cross-check against an independently coded direct recursion
    double m = E(0, 0);
    for (std::size_t t = 1; t < rows; ++t) {
      m = s * E(t - 1, 0) + (1.0 - s) * m;
      REQUIRE(M(t, 0) == m);
    }
  }
}

TEST_CASE("smoother stays bounded by the input maximum") {
  const Matrix E = random_positive(128, 8, 5);
  const double emax = E.max_value();
  for (double s : {0.1, 0.9}) {
    const Matrix M = smooth(E, s);
    for (double v : M.data) REQUIRE(v <= emax + 1e-12);
  }
}

TEST_CASE("smoothing coefficient outside (0, 1] is rejected") {
  const Matrix E = constant(4, 2, 1.0);
  REQUIRE_THROWS_AS(smooth(E, 0.0), ConfigError);
  REQUIRE_THROWS_AS(smooth(E, 1.5), ConfigError);
  REQUIRE_THROWS_AS(smooth(E, -0.1), ConfigError);
}

// ---------------------------------------------------------------------------
// gain control
// ---------------------------------------------------------------------------

TEST_CASE("constant input self-normalizes to 1 at unit bias and root") {
  const Matrix E = constant(32, 4, 2.7);
  PcenParams p;
  p.s = 0.4;
  p.epsilon = 0.0;
  p.alpha = 1.0;
  p.delta = 1.0;
  p.r = 1.0;
  const Matrix out = pcen(E, p);
  for (std::size_t t = 1; t < out.rows; ++t)
    for (std::size_t f = 0; f < out.cols; ++f)
      REQUIRE(out(t, f) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("neutral parameters pass the spectrogram through unchanged") {
  const Matrix E = random_positive(16, 5, 2, 0.0, 10.0);
  PcenParams p;
  p.s = 0.5;
  p.epsilon = 0.0;
  p.alpha = 0.0;
  p.delta = 0.0;
  p.r = 1.0;
  const Matrix out = pcen(E, p);
  for (std::size_t i = 0; i < E.data.size(); ++i) REQUIRE(out.data[i] == E.data[i]);
}

TEST_CASE("small r approaches the softplus flux") {
  const Matrix E = random_positive(64, 32, 30000);
  PcenParams p;
  p.s = 1.0;
  p.epsilon = 0.0;
  p.alpha = 1.0;
  p.delta = 1.0;
  p.r = 1e-4;
  const Matrix sp = softplus_flux(E);
  REQUIRE(max_abs_dev_from_row1(pcen(E, p), sp) < 1e-3);
}

TEST_CASE("deviation from softplus flux decreases monotonically in r") {
  const Matrix E = random_positive(64, 32, 30001);
  const Matrix sp = softplus_flux(E);
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
    PcenParams p;
    p.s = 1.0;
    p.epsilon = 0.0;
    p.alpha = 1.0;
    p.delta = 1.0;
    p.r = r;
    const double dev = max_abs_dev_from_row1(pcen(E, p), sp);
    REQUIRE(dev < prev);
    prev = dev;
  }
  REQUIRE(prev < 1e-3);
}

TEST_CASE("gain invariance at alpha = 1 and epsilon = 0") {
  const Matrix E = random_positive(40, 16, 6);
  PcenParams p;
  p.s = 0.2;
  p.epsilon = 0.0;
  p.alpha = 1.0;
  p.delta = 1.0;
  p.r = 0.0;
  const Matrix base = pcen(E, p);
  for (double k : {1e-3, 7.0, 1e3}) {
    Matrix scaled = E;
    for (double& v : scaled.data) v *= k;
    const Matrix out = pcen(scaled, p);
    for (std::size_t i = 0; i < out.data.size(); ++i)
      REQUIRE(out.data[i] == Approx(base.data[i]).margin(1e-6));
  }
}

TEST_CASE("r = 0 analytic form equals the numerical limit") {
  const Matrix E = random_positive(32, 8, 8);
  PcenParams p;
  p.s = 0.3;
  p.epsilon = 0.0;
  p.alpha = 1.0;
  p.delta = 1.0;
  p.r = 0.0;
  const Matrix exact = pcen(E, p);
  p.r = 1e-6;
  const Matrix approx = pcen(E, p);
  for (std::size_t i = 0; i < exact.data.size(); ++i)
    REQUIRE(std::abs(exact.data[i] - approx.data[i]) < 1e-4);
}

TEST_CASE("division by zero names the offending entry") {
  Matrix E = constant(4, 3, 1.0);
  E(0, 2) = 0.0;  // M[0,2] = 0 with epsilon = 0
  PcenParams p;
  p.s = 0.5;
  p.epsilon = 0.0;
  p.alpha = 1.0;
  p.delta = 1.0;
  p.r = 1.0;
  REQUIRE_THROWS_AS(pcen(E, p), NumericError);
  REQUIRE_THROWS_WITH(pcen(E, p), Catch::Contains("t=0") && Catch::Contains("f=2"));
}

TEST_CASE("r = 0 with delta = 0 is rejected") {
  PcenParams p;
  p.r = 0.0;
  p.delta = 0.0;
  REQUIRE_THROWS_AS(validate(p), ConfigError);
}

// ---------------------------------------------------------------------------
// softplus flux
// ---------------------------------------------------------------------------

TEST_CASE("equal consecutive frames give log 2") {
  const Matrix E = constant(8, 2, 5.5);
  const Matrix out = softplus_flux(E);
  for (std::size_t f = 0; f < out.cols; ++f) REQUIRE(out(0, f) == 0.0);
  for (std::size_t t = 1; t < out.rows; ++t)
    for (std::size_t f = 0; f < out.cols; ++f)
      REQUIRE(out(t, f) == Approx(0.6931471805599453).epsilon(1e-12));
}

TEST_CASE("zero current frame gives zero flux") {
  Matrix E(2, 1, 3.0);
  E(1, 0) = 0.0;
  REQUIRE(softplus_flux(E)(1, 0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("ratio 9 gives log 10") {
  Matrix E(2, 1, 1.0);
  E(1, 0) = 9.0;
  REQUIRE(softplus_flux(E)(1, 0) == Approx(2.302585092994046).epsilon(1e-12));
}

TEST_CASE("zero predecessor magnitude names the entry") {
  Matrix E(3, 2, 1.0);
  E(1, 1) = 0.0;  // predecessor of t = 2
  REQUIRE_THROWS_WITH(softplus_flux(E), Catch::Contains("t=2") && Catch::Contains("f=1"));
}

TEST_CASE("softplus flux dominates rectified log flux") {
  const Matrix E = random_positive(32, 16, 10);
  const Matrix sp = softplus_flux(E);
  for (std::size_t t = 1; t < E.rows; ++t)
    for (std::size_t f = 0; f < E.cols; ++f) {
      const double relu = std::max(std::log(E(t, f)) - std::log(E(t - 1, f)), 0.0);
      REQUIRE(sp(t, f) >= relu - 1e-12);
    }
}

// ---------------------------------------------------------------------------
// time-scale convenience
// ---------------------------------------------------------------------------

TEST_CASE("time-scale mapping is a sane approximation") {
  const double s = s_from_time(0.1, 100.0);  // T = 100 ms at 100 fps
  REQUIRE(s == Approx(1.0 - std::exp(-0.1)).epsilon(1e-12));
  REQUIRE(s > 0.0);
  REQUIRE(s < 1.0);
  REQUIRE_THROWS_AS(s_from_time(0.0, 100.0), ConfigError);
  REQUIRE_THROWS_AS(s_from_time(1.0, 0.0), ConfigError);
}
