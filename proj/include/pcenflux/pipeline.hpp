// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pcenflux/config.hpp"
#include "pcenflux/evaluation.hpp"
#include "pcenflux/frontend.hpp"
#include "pcenflux/novelty.hpp"
#include "pcenflux/synthesis.hpp"

namespace pcenflux {

using Json = nlohmann::ordered_json;

/// Waveform -> detection curve for the configured frontend and detector.
/// Two passes over the frames in bounded memory: the first finds the clip
/// maximum (for the relative magnitude floor), the second streams the
/// detector. Applies scene normalization when configured. Identical to
/// running the batch spectrogram + detector functions.
inline NoveltyCurve detect_curve(const Waveform& w, const PipelineConfig& cfg) {
  FrameExtractor ex(w, cfg.frontend);
  const std::size_t n = ex.n_frames();
  std::vector<double> bands;
  double clip_max = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    ex.bands(t, bands);
    for (double v : bands) clip_max = std::max(clip_max, v);
  }
  NoveltyCurve curve;
  curve.frame_rate = ex.frame_rate();
  curve.detector = cfg.detector;
  curve.values.resize(n);
  NoveltyExtractor nov(cfg.detector, ex.n_bands(),
                       cfg.detector == Detector::pcen_max ? cfg.pcen.s : 1.0,
                       relative_floor(clip_max));
  for (std::size_t t = 0; t < n; ++t) {
    ex.bands(t, bands);
    curve.values[t] = nov.push(bands);
  }
  const std::size_t scene = scene_length_frames(cfg);
  return scene > 0 ? scene_normalize(curve, scene) : curve;
}

// ---------------------------------------------------------------------------
// Corpus manifest CSV: clip_id,kind,distance_m,seed,path
// (distance_m is empty for negative scenes).
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string clip_id;
  std::string kind;
  bool is_positive = false;
  double distance_m = 0.0;
  std::uint64_t seed = 0;
  std::string path;
};

inline std::string manifest_to_csv(const std::vector<ManifestEntry>& entries) {
  std::string out = "clip_id,kind,distance_m,seed,path\n";
  char buf[64];
  for (const ManifestEntry& e : entries) {
    out += e.clip_id + ',' + e.kind + ',';
    if (e.is_positive) {
      std::snprintf(buf, sizeof buf, "%.9g", e.distance_m);
      out += buf;
    }
    out += ',' + std::to_string(e.seed) + ',' + e.path + '\n';
  }
  return out;
}

inline std::vector<ManifestEntry> manifest_from_csv(std::istream& is,
                                                    const std::string& origin) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty manifest '" + origin + "'");
  if (detail::trim(line) != "clip_id,kind,distance_m,seed,path")
    throw IoError("bad manifest header in '" + origin + "': " + line);
  std::vector<ManifestEntry> entries;
  while (std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (fields.size() == 4) fields.push_back("");  // trailing empty path
    if (fields.size() != 5)
      throw IoError("malformed manifest row in '" + origin + "': " + line);
    ManifestEntry e;
    e.clip_id = fields[0];
    e.kind = fields[1];
    e.is_positive = !detail::trim(fields[2]).empty();
    if (e.is_positive) e.distance_m = detail::parse_double(fields[2], "distance_m");
    e.seed = static_cast<std::uint64_t>(std::stoull(fields[3]));
    e.path = fields[4];
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<ManifestEntry> read_manifest_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest '" + path + "'");
  return manifest_from_csv(is, path);
}

// ---------------------------------------------------------------------------
// JSON emission. The +infinity sentinel renders as the string "inf".
// ---------------------------------------------------------------------------

namespace detail {

inline Json json_num_or_inf(double v) {
  if (std::isinf(v)) return Json("inf");
  return Json(v);
}

inline double double_from_json(const Json& j, const char* key) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw IoError(std::string("unexpected string for '") + key + "' in thresholds JSON");
  }
  return j.get<double>();
}

}  // namespace detail

inline Json thresholds_to_json(const std::string& detector,
                               const std::vector<CalibratedBin>& bins) {
  Json out;
  out["detector"] = detector;
  out["bins"] = Json::array();
  for (const CalibratedBin& b : bins) {
    Json jb;
    jb["bin_lo_m"] = detail::json_num_or_inf(b.lo_m);
    jb["bin_hi_m"] = detail::json_num_or_inf(b.hi_m);
    jb["threshold"] = b.threshold;
    jb["recall"] = b.recall;
    jb["n_clips"] = b.n_clips;
    out["bins"].push_back(jb);
  }
  return out;
}

inline std::vector<CalibratedBin> thresholds_from_json(const Json& j) {
  std::vector<CalibratedBin> bins;
  if (!j.contains("bins") || !j["bins"].is_array())
    throw IoError("thresholds JSON lacks a 'bins' array");
  for (const Json& jb : j["bins"]) {
    CalibratedBin b;
    b.lo_m = detail::double_from_json(jb.at("bin_lo_m"), "bin_lo_m");
    b.hi_m = detail::double_from_json(jb.at("bin_hi_m"), "bin_hi_m");
    b.threshold = jb.at("threshold").get<double>();
    b.recall = jb.at("recall").get<double>();
    b.n_clips = jb.at("n_clips").get<std::size_t>();
    bins.push_back(b);
  }
  return bins;
}

inline Json report_to_json(const EvalReport& report) {
  Json out;
  out["detector"] = report.detector;
  out["counting"] = to_string(report.counting);
  Json cfg = Json::object();
  for (const auto& [key, value] : report.config_snapshot) cfg[key] = value;
  out["config"] = cfg;
  out["bins"] = Json::array();
  for (const BinReport& b : report.bins) {
    Json jb;
    jb["bin_lo_m"] = detail::json_num_or_inf(b.lo_m);
    jb["bin_hi_m"] = detail::json_num_or_inf(b.hi_m);
    jb["threshold"] = b.threshold;
    jb["recall"] = b.recall;
    jb["false_alarms"] = b.false_alarms;
    jb["neg_duration_s"] = b.negative_duration_sec;
    jb["mtbfa_s"] = detail::json_num_or_inf(b.mtbfa_sec);
    out["bins"].push_back(jb);
  }
  return out;
}

}  // namespace pcenflux
