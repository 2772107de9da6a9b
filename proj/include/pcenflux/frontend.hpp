// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "pcenflux/error.hpp"
#include "pcenflux/fft.hpp"
#include "pcenflux/types.hpp"

namespace pcenflux {

enum class FreqScale { linear, mel };

inline const char* to_string(FreqScale s) {
  return s == FreqScale::linear ? "linear" : "mel";
}

inline FreqScale freq_scale_from_string(const std::string& s) {
  if (s == "linear") return FreqScale::linear;
  if (s == "mel") return FreqScale::mel;
  throw ConfigError("unknown freq_scale '" + s + "' (expected linear|mel)");
}

/// Frame/band parametrization of the magnitude spectrogram. Only Hann
/// tapering is supported.
struct SpectrogramConfig {
  int sample_rate = 0;
  int window_length = 0;  // samples
  int hop_length = 0;     // samples
  int n_bands = 0;
  FreqScale freq_scale = FreqScale::linear;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;
};

inline void validate(const SpectrogramConfig& cfg) {
  if (cfg.sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (cfg.window_length <= 0) throw ConfigError("window_length must be positive");
  if (cfg.hop_length <= 0 || cfg.hop_length > cfg.window_length)
    throw ConfigError("hop_length must satisfy 0 < hop_length <= window_length");
  if (cfg.n_bands < 1) throw ConfigError("n_bands must be >= 1");
  if (!(cfg.fmin_hz >= 0.0 && cfg.fmin_hz < cfg.fmax_hz))
    throw ConfigError("frequency range must satisfy 0 <= fmin < fmax");
  if (cfg.fmax_hz > 0.5 * cfg.sample_rate + 1e-9)
    throw ConfigError("fmax " + std::to_string(cfg.fmax_hz) +
                      " Hz exceeds Nyquist " + std::to_string(0.5 * cfg.sample_rate) + " Hz");
}

/// Nonnegative magnitude matrix, one row per frame, one column per band.
struct Spectrogram {
  Matrix values;  // (n_frames x n_bands)
  double frame_rate = 0.0;
  SpectrogramConfig config;

  std::size_t n_frames() const { return values.rows; }
  std::size_t n_bands() const { return values.cols; }
};

/// Periodic Hann taper, applied without amplitude compensation.
inline std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

inline std::size_t frame_count(std::size_t n_samples, const SpectrogramConfig& cfg) {
  // floor((len - window) / hop) + 1; first frame starts at sample 0, no padding.
  return (n_samples - static_cast<std::size_t>(cfg.window_length)) /
             static_cast<std::size_t>(cfg.hop_length) +
         1;
}

// ---------------------------------------------------------------------------
// Linear-scale band selection
// ---------------------------------------------------------------------------

/// Half-spectrum bins retained for a linear-scale spectrogram: bin k (center
/// k * sr / window) is kept iff its support [center - df/2, center + df/2]
/// intersects [fmin, fmax]. The marine preset (sr 2000, win 256, 8-1000 Hz)
/// then keeps exactly bins 1..128, i.e. the half spectrum minus DC.
struct LinearBandSelection {
  std::size_t first_bin = 0;
  std::size_t count = 0;
  std::vector<double> center_hz;
};

inline LinearBandSelection select_linear_bands(const SpectrogramConfig& cfg) {
  const double df = static_cast<double>(cfg.sample_rate) / cfg.window_length;
  const std::size_t half_bins = static_cast<std::size_t>(cfg.window_length) / 2 + 1;
  LinearBandSelection sel;
  bool in_range = false;
  for (std::size_t k = 0; k < half_bins; ++k) {
    const double center = static_cast<double>(k) * df;
    const bool keep = center + 0.5 * df >= cfg.fmin_hz && center - 0.5 * df <= cfg.fmax_hz;
    if (keep && !in_range) {
      sel.first_bin = k;
      in_range = true;
    }
    if (keep) {
      ++sel.count;
      sel.center_hz.push_back(center);
    }
  }
  if (sel.count != static_cast<std::size_t>(cfg.n_bands))
    throw ConfigError("linear band selection yields " + std::to_string(sel.count) +
                      " bins in [" + std::to_string(cfg.fmin_hz) + ", " +
                      std::to_string(cfg.fmax_hz) + "] Hz but n_bands = " +
                      std::to_string(cfg.n_bands));
  return sel;
}

// ---------------------------------------------------------------------------
// Mel filterbank
// ---------------------------------------------------------------------------

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters with unit peak amplitude, centers equally spaced on
/// the mel scale between fmin and fmax. Each weight is the triangle averaged
/// over the FFT bin's support interval, so a triangle narrower than one bin
/// still lands on the bin that contains it (pointwise sampling would leave
/// such filters empty).
struct MelFilterbank {
  std::size_t n_fft_bins = 0;
  std::vector<double> center_hz;            // one per band, strictly increasing
  std::vector<std::size_t> first_bin;       // sparse row start per band
  std::vector<std::vector<double>> weights; // sparse row weights per band

  std::size_t n_bands() const { return center_hz.size(); }

  Matrix dense() const {
    Matrix m(n_bands(), n_fft_bins, 0.0);
    for (std::size_t b = 0; b < n_bands(); ++b)
      for (std::size_t j = 0; j < weights[b].size(); ++j)
        m(b, first_bin[b] + j) = weights[b][j];
    return m;
  }

  void apply(std::span<const double> spectrum, std::vector<double>& out) const {
    out.resize(n_bands());
    for (std::size_t b = 0; b < n_bands(); ++b) {
      double acc = 0.0;
      const auto& w = weights[b];
      const std::size_t k0 = first_bin[b];
      for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * spectrum[k0 + j];
      out[b] = acc;
    }
  }
};

namespace detail {

// Integral over [u, v] of the line through (x0, 0) and (x1, 1); zero-width
// segments contribute nothing.
inline double ramp_integral(double x0, double x1, double u, double v) {
  const double lo = std::max(u, std::min(x0, x1));
  const double hi = std::min(v, std::max(x0, x1));
  if (hi <= lo || x0 == x1) return 0.0;
  const double a = (lo - x0) / (x1 - x0);
  const double b = (hi - x0) / (x1 - x0);
  return 0.5 * (a + b) * (hi - lo);
}

}  // namespace detail

inline MelFilterbank mel_filterbank(const SpectrogramConfig& cfg, std::size_t n_fft_bins) {
  validate(cfg);
  if (cfg.freq_scale != FreqScale::mel)
    throw ConfigError("mel_filterbank requires freq_scale = mel");
  if (n_fft_bins < 2) throw ConfigError("mel_filterbank needs at least 2 FFT bins");

  const int n_fft = static_cast<int>(2 * (n_fft_bins - 1));
  const double df = static_cast<double>(cfg.sample_rate) / n_fft;
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.fmax_hz);
  const int nb = cfg.n_bands;

  std::vector<double> node_hz(static_cast<std::size_t>(nb) + 2);
  for (int i = 0; i < nb + 2; ++i)
    node_hz[static_cast<std::size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (nb + 1));

  MelFilterbank fb;
  fb.n_fft_bins = n_fft_bins;
  fb.center_hz.assign(node_hz.begin() + 1, node_hz.end() - 1);
  fb.first_bin.resize(static_cast<std::size_t>(nb));
  fb.weights.resize(static_cast<std::size_t>(nb));

  for (int b = 0; b < nb; ++b) {
    const double left = node_hz[static_cast<std::size_t>(b)];
    const double center = node_hz[static_cast<std::size_t>(b) + 1];
    const double right = node_hz[static_cast<std::size_t>(b) + 2];
    std::vector<double> row;
    std::size_t row_start = 0;
    for (std::size_t k = 0; k < n_fft_bins; ++k) {
      const double u = static_cast<double>(k) * df - 0.5 * df;
      const double v = u + df;
      const double w = (detail::ramp_integral(left, center, u, v) +
                        detail::ramp_integral(right, center, u, v)) /
                       df;
      if (w > 0.0) {
        if (row.empty()) row_start = k;
        row.push_back(w);
      } else if (!row.empty()) {
        break;  // triangle support passed
      }
    }
    if (row.empty())
      throw ConfigError("mel filter " + std::to_string(b) +
                        " has no nonzero weight: n_bands too large for the FFT resolution");
    fb.first_bin[static_cast<std::size_t>(b)] = row_start;
    fb.weights[static_cast<std::size_t>(b)] = std::move(row);
  }
  return fb;
}

// ---------------------------------------------------------------------------
// Frame extraction
// ---------------------------------------------------------------------------

/// Computes per-frame band magnitudes for either scale. Shared by the batch
/// transforms below and by the CLI's bounded-memory two-pass path; both
/// therefore produce bit-identical values.
class FrameExtractor {
 public:
  FrameExtractor(const Waveform& w, const SpectrogramConfig& cfg)
      : samples_(w.samples), cfg_(cfg), window_(hann_window(cfg.window_length)) {
    validate(cfg);
    validate(w);
    if (w.sample_rate != cfg.sample_rate)
      throw ConfigError("waveform sample rate " + std::to_string(w.sample_rate) +
                        " Hz does not match config " + std::to_string(cfg.sample_rate) + " Hz");
    if (samples_.size() < static_cast<std::size_t>(cfg.window_length))
      throw ConfigError("waveform too short: " + std::to_string(samples_.size()) +
                        " samples < one window of " + std::to_string(cfg.window_length));
    if (cfg.freq_scale == FreqScale::linear) {
      selection_ = select_linear_bands(cfg);
    } else {
      filterbank_ = mel_filterbank(cfg, static_cast<std::size_t>(cfg.window_length) / 2 + 1);
    }
  }

  std::size_t n_frames() const { return frame_count(samples_.size(), cfg_); }
  std::size_t n_bands() const { return static_cast<std::size_t>(cfg_.n_bands); }
  double frame_rate() const {
    return static_cast<double>(cfg_.sample_rate) / cfg_.hop_length;
  }
  const SpectrogramConfig& config() const { return cfg_; }

  /// Band magnitudes of frame t (frame starts at sample t * hop).
  void bands(std::size_t t, std::vector<double>& out) {
    const std::size_t start = t * static_cast<std::size_t>(cfg_.hop_length);
    const std::span<const double> frame =
        samples_.subspan(start, static_cast<std::size_t>(cfg_.window_length));
    fft::half_spectrum_magnitude(frame, window_, scratch_, spectrum_);
    if (cfg_.freq_scale == FreqScale::linear) {
      out.resize(selection_.count);
      for (std::size_t j = 0; j < selection_.count; ++j)
        out[j] = spectrum_[selection_.first_bin + j];
    } else {
      filterbank_.apply(spectrum_, out);
    }
  }

 private:
  std::span<const double> samples_;
  SpectrogramConfig cfg_;
  std::vector<double> window_;
  LinearBandSelection selection_;
  MelFilterbank filterbank_;
  std::vector<std::complex<double>> scratch_;
  std::vector<double> spectrum_;
};

namespace detail {

inline Spectrogram extract_all(const Waveform& w, const SpectrogramConfig& cfg) {
  FrameExtractor ex(w, cfg);
  Spectrogram s;
  s.config = cfg;
  s.frame_rate = ex.frame_rate();
  s.values = Matrix(ex.n_frames(), ex.n_bands());
  std::vector<double> b;
  for (std::size_t t = 0; t < ex.n_frames(); ++t) {
    ex.bands(t, b);
    for (std::size_t f = 0; f < b.size(); ++f) s.values(t, f) = b[f];
  }
  return s;
}

}  // namespace detail

/// Magnitude (not power) spectrogram on a linear frequency scale, restricted
/// to the configured band range.
inline Spectrogram stft_magnitude(const Waveform& w, const SpectrogramConfig& cfg) {
  validate(cfg);
  if (cfg.freq_scale != FreqScale::linear)
    throw ConfigError("stft_magnitude requires freq_scale = linear");
  return detail::extract_all(w, cfg);
}

/// Mel-scale magnitude spectrogram: linear half spectrum through the
/// triangular filterbank.
inline Spectrogram mel_spectrogram(const Waveform& w, const SpectrogramConfig& cfg) {
  validate(cfg);
  if (cfg.freq_scale != FreqScale::mel)
    throw ConfigError("mel_spectrogram requires freq_scale = mel");
  return detail::extract_all(w, cfg);
}

inline Spectrogram spectrogram(const Waveform& w, const SpectrogramConfig& cfg) {
  return cfg.freq_scale == FreqScale::linear ? stft_magnitude(w, cfg)
                                             : mel_spectrogram(w, cfg);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// 128 mel bands over 2-11.025 kHz, 12 ms Hann window (256 samples),
/// 1.5 ms hop (32 samples) at 22 050 Hz.
inline SpectrogramConfig avian_spectrogram_config() {
  return {22050, 256, 32, 128, FreqScale::mel, 2000.0, 11025.0};
}

/// 128 linear bands over 8-1000 Hz, 128 ms Hann window, 64 ms hop at
/// 2 000 Hz (256/128 samples): the half spectrum minus DC.
inline SpectrogramConfig marine_spectrogram_config() {
  return {2000, 256, 128, 128, FreqScale::linear, 8.0, 1000.0};
}

}  // namespace pcenflux
