// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pcenflux/error.hpp"
#include "pcenflux/frontend.hpp"
#include "pcenflux/types.hpp"

namespace pcenflux {

enum class Detector { sf_avg, sf_max, pcen_max };

inline const char* to_string(Detector d) {
  switch (d) {
    case Detector::sf_avg: return "sf_avg";
    case Detector::sf_max: return "sf_max";
    default: return "pcen_max";
  }
}

inline Detector detector_from_string(const std::string& s) {
  if (s == "sf_avg") return Detector::sf_avg;
  if (s == "sf_max") return Detector::sf_max;
  if (s == "pcen_max") return Detector::pcen_max;
  throw ConfigError("unknown detector '" + s + "' (expected sf_avg|sf_max|pcen_max)");
}

/// Scalar detection-function value per frame. Values at t = 0 are 0 by
/// convention (no predecessor frame). sf_max values may be negative; the
/// other two detectors are nonnegative.
struct NoveltyCurve {
  std::vector<double> values;
  double frame_rate = 0.0;
  Detector detector = Detector::pcen_max;
};

/// Floor applied to magnitudes before logs and before the gain-control
/// smoother: 1e-10 times the clip's largest entry. Scaling with the clip
/// preserves gain invariance while bounding flux values. Zero means the
/// whole clip is silent.
inline double relative_floor(double clip_max) { return 1e-10 * clip_max; }

/// Frame-at-a-time detection-function core. Feeding it the rows of a
/// spectrogram reproduces the batch functions below exactly; the CLI uses it
/// to process hours-long recordings in bounded memory (one pass to find the
/// clip maximum, one pass to emit values).
class NoveltyExtractor {
 public:
  NoveltyExtractor(Detector det, std::size_t n_bands, double smoothing, double floor)
      : det_(det), n_bands_(n_bands), s_(smoothing), floor_(floor) {
    if (det == Detector::pcen_max && !(smoothing > 0.0 && smoothing <= 1.0))
      throw ConfigError("smoothing coefficient s must be in (0, 1], got " +
                        std::to_string(smoothing));
    if (floor < 0.0) throw ConfigError("magnitude floor must be >= 0");
    state_.reserve(n_bands);
  }

  /// Value of the detection function for the next frame; the first call
  /// always returns 0.
  double push(std::span<const double> bands) {
    if (bands.size() != n_bands_)
      throw ConfigError("frame has " + std::to_string(bands.size()) + " bands, expected " +
                        std::to_string(n_bands_));
    for (std::size_t f = 0; f < bands.size(); ++f)
      if (!(bands[f] >= 0.0) || !std::isfinite(bands[f]))
        throw NumericError("spectrogram entry at t=" + std::to_string(t_) +
                           ", f=" + std::to_string(f) + " is not a finite nonnegative value");

    double value = 0.0;
    if (t_ == 0) {
      state_.resize(n_bands_);
      for (std::size_t f = 0; f < n_bands_; ++f) state_[f] = floored_state(bands[f]);
    } else if (floor_ == 0.0) {
      // silent clip: every magnitude is zero, the curve is zero by convention
      for (std::size_t f = 0; f < n_bands_; ++f)
        if (bands[f] > 0.0)
          throw NumericError("floor is 0 (clip reported silent) but magnitude at t=" +
                             std::to_string(t_) + ", f=" + std::to_string(f) + " is positive");
      value = 0.0;
    } else {
      switch (det_) {
        case Detector::sf_avg: {
          double acc = 0.0;
          for (std::size_t f = 0; f < n_bands_; ++f) {
            const double lg = std::log(std::max(bands[f], floor_));
            acc += std::max(lg - state_[f], 0.0);
          }
          value = acc / static_cast<double>(n_bands_);
          break;
        }
        case Detector::sf_max: {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t f = 0; f < n_bands_; ++f) {
            const double lg = std::log(std::max(bands[f], floor_));
            best = std::max(best, lg - state_[f]);
          }
          value = best;  // no rectification: negative values are preserved
          break;
        }
        case Detector::pcen_max: {
          double best = 0.0;
          for (std::size_t f = 0; f < n_bands_; ++f) {
            if (!(state_[f] > 0.0))
              throw NumericError("zero gain-control denominator at frame t=" +
                                 std::to_string(t_));
            best = std::max(best, std::max(bands[f], floor_) / state_[f]);
          }
          value = std::log1p(best);
          break;
        }
      }
      for (std::size_t f = 0; f < n_bands_; ++f) update_state(f, bands[f]);
    }
    ++t_;
    return value;
  }

 private:
  double floored_state(double v) const {
    const double fl = std::max(v, floor_);
    return det_ == Detector::pcen_max ? fl : (floor_ == 0.0 ? 0.0 : std::log(fl));
  }

  void update_state(std::size_t f, double v) {
    if (det_ == Detector::pcen_max)
      state_[f] = s_ * std::max(v, floor_) + (1.0 - s_) * state_[f];
    else
      state_[f] = floor_ == 0.0 ? 0.0 : std::log(std::max(v, floor_));
  }

  Detector det_;
  std::size_t n_bands_;
  double s_;
  double floor_;
  std::size_t t_ = 0;
  std::vector<double> state_;  // previous log magnitudes, or the smoother M
};

namespace detail {

inline NoveltyCurve run_detector(const Spectrogram& E, Detector det, double smoothing) {
  NoveltyCurve c;
  c.frame_rate = E.frame_rate;
  c.detector = det;
  c.values.resize(E.n_frames());
  NoveltyExtractor ex(det, E.n_bands(), smoothing, relative_floor(E.values.max_value()));
  for (std::size_t t = 0; t < E.n_frames(); ++t) c.values[t] = ex.push(E.values.row(t));
  return c;
}

}  // namespace detail

/// Rectified log-magnitude flux averaged across bands (frequential mean of
/// max(log E[t,f] - log E[t-1,f], 0)).
inline NoveltyCurve sf_avg(const Spectrogram& E) {
  return detail::run_detector(E, Detector::sf_avg, 1.0);
}

/// Max-pooled log-magnitude flux; differentiates a single band per frame and
/// keeps negative values.
inline NoveltyCurve sf_max(const Spectrogram& E) {
  return detail::run_detector(E, Detector::sf_max, 1.0);
}

/// Max-pooled adaptive gain control: log(1 + max_f E[t,f] / M[t,f]) with M
/// the first-order smoother at coefficient s.
inline NoveltyCurve pcen_max(const Spectrogram& E, double smoothing) {
  return detail::run_detector(E, Detector::pcen_max, smoothing);
}

/// Subtracts the minimum over consecutive non-overlapping windows of
/// scene_length frames (the last window may be shorter), so each window's
/// minimum becomes 0.
inline NoveltyCurve scene_normalize(const NoveltyCurve& c, std::size_t scene_length) {
  if (scene_length < 1) throw ConfigError("scene_length must be >= 1 frame");
  NoveltyCurve out = c;
  for (std::size_t start = 0; start < out.values.size(); start += scene_length) {
    const std::size_t end = std::min(start + scene_length, out.values.size());
    double mn = out.values[start];
    for (std::size_t i = start + 1; i < end; ++i) mn = std::min(mn, out.values[i]);
    for (std::size_t i = start; i < end; ++i) out.values[i] -= mn;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV serialization: header `frame,time_sec,value`, time to 6 decimal places.
// ---------------------------------------------------------------------------

inline void write_curve_csv(std::ostream& os, const NoveltyCurve& c) {
  os << "frame,time_sec,value\n";
  char buf[96];
  for (std::size_t t = 0; t < c.values.size(); ++t) {
    const double time_sec = c.frame_rate > 0.0 ? static_cast<double>(t) / c.frame_rate : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.9g\n", t, time_sec, c.values[t]);
    os << buf;
  }
}

inline void write_curve_csv(const std::string& path, const NoveltyCurve& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_curve_csv(os, c);
  if (!os.good()) throw IoError("failed writing '" + path + "'");
}

/// Reads back the `value` column; frame rate and detector are not stored in
/// the CSV and must come from configuration.
inline std::vector<double> read_curve_values_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open curve CSV '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty curve CSV '" + path + "'");
  if (line.rfind("frame,time_sec,value", 0) != 0)
    throw IoError("bad curve CSV header in '" + path + "': " + line);
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto last_comma = line.find_last_of(',');
    if (last_comma == std::string::npos)
      throw IoError("malformed curve CSV row in '" + path + "': " + line);
    try {
      values.push_back(std::stod(line.substr(last_comma + 1)));
    } catch (const std::exception&) {
      throw IoError("malformed curve CSV value in '" + path + "': " + line);
    }
  }
  return values;
}

}  // namespace pcenflux
