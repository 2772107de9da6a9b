// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pcenflux/error.hpp"
#include "pcenflux/novelty.hpp"

namespace pcenflux {

enum class CountingMode { frames, peaks };

inline const char* to_string(CountingMode m) {
  return m == CountingMode::frames ? "frames" : "peaks";
}

inline CountingMode counting_mode_from_string(const std::string& s) {
  if (s == "frames") return CountingMode::frames;
  if (s == "peaks") return CountingMode::peaks;
  throw ConfigError("unknown counting mode '" + s + "' (expected frames|peaks)");
}

/// A short recording containing exactly one event, at a known distance.
struct PositiveClip {
  NoveltyCurve curve;
  double distance_m = 0.0;
  std::string clip_id;
};

struct DistanceBin {
  double lo_m = 0.0;
  double hi_m = 0.0;  // +infinity for the last, open-ended bin
  std::vector<const PositiveClip*> clips;
};

/// Detectability statistic of a clip: the curve maximum excluding the first
/// frame (warm-up, which carries no contrast information).
inline double clip_score(const NoveltyCurve& curve) {
  if (curve.values.size() < 2)
    throw ConfigError("clip_score needs at least 2 frames, got " +
                      std::to_string(curve.values.size()));
  double best = curve.values[1];
  for (std::size_t t = 2; t < curve.values.size(); ++t)
    best = std::max(best, curve.values[t]);
  return best;
}

inline double clip_score(const PositiveClip& clip) { return clip_score(clip.curve); }

/// N sorted edges define N bins: [e0,e1), ..., [e_{N-2},e_{N-1}), and a final
/// open-ended [e_{N-1}, +inf).
inline std::vector<DistanceBin> bins_from_edges(const std::vector<double>& edges_m) {
  if (edges_m.empty()) throw ConfigError("at least one bin edge is required");
  for (std::size_t i = 1; i < edges_m.size(); ++i)
    if (!(edges_m[i] > edges_m[i - 1]))
      throw ConfigError("bin edges must be strictly increasing");
  if (edges_m.front() < 0.0) throw ConfigError("bin edges must be nonnegative");
  std::vector<DistanceBin> bins(edges_m.size());
  for (std::size_t i = 0; i < edges_m.size(); ++i) {
    bins[i].lo_m = edges_m[i];
    bins[i].hi_m = i + 1 < edges_m.size() ? edges_m[i + 1]
                                          : std::numeric_limits<double>::infinity();
  }
  return bins;
}

struct CalibratedBin {
  double lo_m = 0.0;
  double hi_m = 0.0;
  double threshold = 0.0;
  double recall = 0.0;
  std::size_t n_clips = 0;
};

/// Detection threshold at the upper median of the scores (k-th largest with
/// k = ceil(n/2)), so that exactly ceil(n/2) of n distinct scores lie at or
/// above it: the smallest achievable recall that is still >= 50%.
inline double calibrate_threshold(std::vector<double> scores) {
  if (scores.size() < 2)
    throw ConfigError("threshold calibration needs at least 2 clips, got " +
                      std::to_string(scores.size()));
  std::sort(scores.begin(), scores.end(), std::greater<double>());
  const std::size_t k = (scores.size() + 1) / 2;  // ceil(n/2)
  return scores[k - 1];
}

inline CalibratedBin calibrate_bin(const DistanceBin& bin) {
  if (bin.clips.empty())
    throw ConfigError("distance bin [" + std::to_string(bin.lo_m) + ", " +
                      std::to_string(bin.hi_m) + ") m contains no positive clips");
  // deterministic score order: descending score, ties by clip_id
  std::vector<std::pair<double, const PositiveClip*>> scored;
  scored.reserve(bin.clips.size());
  for (const PositiveClip* c : bin.clips) scored.emplace_back(clip_score(*c), c);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->clip_id < b.second->clip_id;
  });
  std::vector<double> scores;
  scores.reserve(scored.size());
  for (const auto& [s, c] : scored) scores.push_back(s);
  CalibratedBin out;
  out.lo_m = bin.lo_m;
  out.hi_m = bin.hi_m;
  out.n_clips = scores.size();
  out.threshold = calibrate_threshold(scores);
  std::size_t at_or_above = 0;
  for (double s : scores)
    if (s >= out.threshold) ++at_or_above;
  out.recall = static_cast<double>(at_or_above) / static_cast<double>(scores.size());
  return out;
}

/// Number of detection-function values strictly above threshold at t >= 1.
/// In peaks mode, a run of equal above-threshold values rising out of its
/// left neighbor counts once (at its left edge) when it falls afterwards or
/// reaches the end of the curve.
inline std::size_t count_false_alarms(const NoveltyCurve& curve, double threshold,
                                      CountingMode mode = CountingMode::frames) {
  if (std::isnan(threshold)) throw ConfigError("false-alarm threshold is NaN");
  const auto& v = curve.values;
  std::size_t count = 0;
  if (mode == CountingMode::frames) {
    for (std::size_t t = 1; t < v.size(); ++t)
      if (v[t] > threshold) ++count;
    return count;
  }
  for (std::size_t t = 1; t < v.size();) {
    if (v[t] > threshold && v[t] > v[t - 1]) {
      std::size_t e = t;
      while (e + 1 < v.size() && v[e + 1] == v[t]) ++e;
      if (e + 1 == v.size() || v[e + 1] < v[t]) ++count;
      t = e + 1;
    } else {
      ++t;
    }
  }
  return count;
}

/// Mean time between false alarms; +infinity when no alarm fired.
inline double mtbfa_seconds(double total_negative_duration_sec, std::size_t false_alarms) {
  if (!(total_negative_duration_sec > 0.0))
    throw ConfigError("negative-set duration must be positive");
  if (false_alarms == 0) return std::numeric_limits<double>::infinity();
  return total_negative_duration_sec / static_cast<double>(false_alarms);
}

struct BinReport {
  double lo_m = 0.0;
  double hi_m = 0.0;
  double threshold = 0.0;
  double recall = 0.0;
  std::size_t false_alarms = 0;
  double negative_duration_sec = 0.0;
  double mtbfa_sec = 0.0;
};

struct EvalReport {
  std::string detector;
  CountingMode counting = CountingMode::frames;
  std::vector<BinReport> bins;  // sorted by lo_m
  std::vector<std::pair<std::string, std::string>> config_snapshot;
};

/// Stage 2 alone: false-alarm counting over ALL negative curves at each
/// already-calibrated threshold.
inline EvalReport evaluate_with_thresholds(const std::vector<CalibratedBin>& calibrated,
                                           const std::vector<NoveltyCurve>& negatives,
                                           CountingMode mode = CountingMode::frames) {
  if (negatives.empty()) throw ConfigError("at least one negative curve is required");
  if (calibrated.empty()) throw ConfigError("no calibrated bins to evaluate");
  double total_duration = 0.0;
  for (const NoveltyCurve& neg : negatives) {
    if (!(neg.frame_rate > 0.0))
      throw ConfigError("negative curve lacks a positive frame rate");
    total_duration += static_cast<double>(neg.values.size()) / neg.frame_rate;
  }
  EvalReport report;
  report.counting = mode;
  for (const CalibratedBin& cal : calibrated) {
    std::size_t alarms = 0;
    for (const NoveltyCurve& neg : negatives)
      alarms += count_false_alarms(neg, cal.threshold, mode);
    BinReport br;
    br.lo_m = cal.lo_m;
    br.hi_m = cal.hi_m;
    br.threshold = cal.threshold;
    br.recall = cal.recall;
    br.false_alarms = alarms;
    br.negative_duration_sec = total_duration;
    br.mtbfa_sec = mtbfa_seconds(total_duration, alarms);
    report.bins.push_back(br);
  }
  std::sort(report.bins.begin(), report.bins.end(),
            [](const BinReport& a, const BinReport& b) { return a.lo_m < b.lo_m; });
  return report;
}

/// Two-stage protocol: per-bin threshold calibration on the positives, then
/// false-alarm counting over ALL negative curves at each bin's threshold.
inline EvalReport evaluate(const std::vector<PositiveClip>& positives,
                           const std::vector<NoveltyCurve>& negatives,
                           const std::vector<double>& bin_edges_m,
                           CountingMode mode = CountingMode::frames) {
  if (negatives.empty()) throw ConfigError("at least one negative curve is required");
  std::vector<DistanceBin> bins = bins_from_edges(bin_edges_m);
  for (const PositiveClip& clip : positives) {
    bool placed = false;
    for (DistanceBin& bin : bins) {
      if (clip.distance_m >= bin.lo_m && clip.distance_m < bin.hi_m) {
        bin.clips.push_back(&clip);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw ConfigError("positive clip '" + clip.clip_id + "' at distance " +
                        std::to_string(clip.distance_m) + " m falls outside all bins");
  }

  std::vector<CalibratedBin> calibrated;
  calibrated.reserve(bins.size());
  for (const DistanceBin& bin : bins) calibrated.push_back(calibrate_bin(bin));
  return evaluate_with_thresholds(calibrated, negatives, mode);
}

// ---------------------------------------------------------------------------
// Report serialization. The +infinity sentinel renders as the string "inf".
// ---------------------------------------------------------------------------

namespace detail {

inline std::string num_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

/// CSV columns: bin_lo_m,bin_hi_m,threshold,recall,false_alarms,neg_duration_s,mtbfa_s
inline std::string to_csv(const EvalReport& report) {
  std::string out = "bin_lo_m,bin_hi_m,threshold,recall,false_alarms,neg_duration_s,mtbfa_s\n";
  for (const BinReport& b : report.bins) {
    out += detail::num_or_inf(b.lo_m) + ',' + detail::num_or_inf(b.hi_m) + ',' +
           detail::num_or_inf(b.threshold) + ',' + detail::num_or_inf(b.recall) + ',' +
           std::to_string(b.false_alarms) + ',' +
           detail::num_or_inf(b.negative_duration_sec) + ',' +
           detail::num_or_inf(b.mtbfa_sec) + '\n';
  }
  return out;
}

}  // namespace pcenflux
