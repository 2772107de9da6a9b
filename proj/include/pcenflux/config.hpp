// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pcenflux/error.hpp"
#include "pcenflux/evaluation.hpp"
#include "pcenflux/frontend.hpp"
#include "pcenflux/novelty.hpp"
#include "pcenflux/pcen.hpp"
#include "pcenflux/synthesis.hpp"

namespace pcenflux {

/// Everything the batch front door needs: frontend parametrization, gain
/// control, detector choice, evaluation protocol knobs, corpus generation.
struct PipelineConfig {
  std::string preset = "avian";  // avian | marine | custom
  SpectrogramConfig frontend;
  PcenParams pcen;
  Detector detector = Detector::pcen_max;
  double scene_length_sec = 10.0;  // <= 0 disables scene normalization
  CountingMode counting = CountingMode::frames;
  std::vector<double> bin_edges_m;
  CorpusConfig synthesis;
};

/// Expands the named preset to the exact parameter sets: avian = mel, 128
/// bands, 2-11025 Hz, win 256, hop 32, sr 22050, s = 0.09; marine = linear,
/// 128 bands, 8-1000 Hz, win 128 ms, hop 64 ms (sr 2000), s = 0.33.
inline PipelineConfig preset_config(const std::string& name) {
  PipelineConfig cfg;
  cfg.preset = name;
  if (name == "avian") {
    cfg.frontend = avian_spectrogram_config();
    cfg.pcen.s = 0.09;
    cfg.bin_edges_m = {30.0, 100.0, 200.0, 300.0, 500.0};
    cfg.synthesis.sample_rate = cfg.frontend.sample_rate;
  } else if (name == "marine") {
    cfg.frontend = marine_spectrogram_config();
    cfg.pcen.s = 0.33;
    cfg.bin_edges_m = {1000.0, 3000.0, 6000.0, 12000.0};
    cfg.synthesis.sample_rate = cfg.frontend.sample_rate;
    cfg.synthesis.distances_m = {1000.0, 3000.0, 6000.0, 12000.0};
    cfg.synthesis.call.kind = CallTemplate::Kind::linear_chirp;
    cfg.synthesis.call.f_start_hz = 100.0;
    cfg.synthesis.call.f_end_hz = 300.0;
    cfg.synthesis.call.duration_sec = 1.0;
    cfg.synthesis.clip_duration_sec = 2.0;
    cfg.synthesis.am_period_sec = 0.128;
  } else if (name == "custom") {
    cfg.frontend = SpectrogramConfig{};
    cfg.bin_edges_m.clear();
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected avian|marine|custom)");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Flat INI-style key-value format, one section per module.
// ---------------------------------------------------------------------------

using IniData = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
}

inline long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
}

inline std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, key));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_double_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace detail

inline IniData parse_ini(std::istream& is, const std::string& origin) {
  IniData data;
  std::string section, line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = detail::trim(t.substr(1, t.size() - 2));
      data[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    data[section][key] = value;
  }
  return data;
}

namespace detail {

struct KeyTracker {
  const std::map<std::string, std::string>* kv = nullptr;
  std::string section;
  std::set<std::string> seen;

  bool has(const std::string& key) {
    if (!kv) return false;
    const bool present = kv->count(key) > 0;
    if (present) seen.insert(key);
    return present;
  }
  const std::string& get(const std::string& key) { return kv->at(key); }

  void check_all_consumed() const {
    if (!kv) return;
    for (const auto& [key, value] : *kv)
      if (!seen.count(key))
        throw ConfigError("unknown config key '" + key + "' in section [" + section + "]");
  }
};

}  // namespace detail

/// Builds a PipelineConfig from parsed INI data: the preset named in
/// [pipeline] (default avian) is expanded first, then every present key
/// overrides it. preset = custom requires the full [frontend] section and
/// [pcen] s to be explicit.
inline PipelineConfig config_from_ini(const IniData& data) {
  for (const auto& [section, kv] : data)
    if (section != "pipeline" && section != "frontend" && section != "pcen" &&
        section != "synthesis")
      throw ConfigError("unknown config section [" + section + "]");

  detail::KeyTracker pipeline{data.count("pipeline") ? &data.at("pipeline") : nullptr,
                              "pipeline", {}};
  detail::KeyTracker frontend{data.count("frontend") ? &data.at("frontend") : nullptr,
                              "frontend", {}};
  detail::KeyTracker pcen_kv{data.count("pcen") ? &data.at("pcen") : nullptr, "pcen", {}};
  detail::KeyTracker synth{data.count("synthesis") ? &data.at("synthesis") : nullptr,
                           "synthesis", {}};

  std::string preset = "avian";
  if (pipeline.has("preset")) preset = pipeline.get("preset");
  PipelineConfig cfg = preset_config(preset);

  if (pipeline.has("detector")) cfg.detector = detector_from_string(pipeline.get("detector"));
  if (pipeline.has("scene_length_sec"))
    cfg.scene_length_sec = detail::parse_double(pipeline.get("scene_length_sec"), "scene_length_sec");
  if (pipeline.has("counting"))
    cfg.counting = counting_mode_from_string(pipeline.get("counting"));
  if (pipeline.has("bin_edges_m"))
    cfg.bin_edges_m = detail::parse_double_list(pipeline.get("bin_edges_m"), "bin_edges_m");

  const bool custom = preset == "custom";
  const char* const required_frontend[] = {"sample_rate", "window_length", "hop_length",
                                           "n_bands",     "freq_scale",    "fmin_hz",
                                           "fmax_hz"};
  if (custom) {
    for (const char* key : required_frontend)
      if (!(data.count("frontend") && data.at("frontend").count(key)))
        throw ConfigError("preset = custom requires explicit [frontend] " + std::string(key));
    if (!(data.count("pcen") && data.at("pcen").count("s")))
      throw ConfigError("preset = custom requires explicit [pcen] s");
  }

  if (frontend.has("sample_rate"))
    cfg.frontend.sample_rate = static_cast<int>(detail::parse_int(frontend.get("sample_rate"), "sample_rate"));
  if (frontend.has("window_length"))
    cfg.frontend.window_length = static_cast<int>(detail::parse_int(frontend.get("window_length"), "window_length"));
  if (frontend.has("hop_length"))
    cfg.frontend.hop_length = static_cast<int>(detail::parse_int(frontend.get("hop_length"), "hop_length"));
  if (frontend.has("n_bands"))
    cfg.frontend.n_bands = static_cast<int>(detail::parse_int(frontend.get("n_bands"), "n_bands"));
  if (frontend.has("freq_scale"))
    cfg.frontend.freq_scale = freq_scale_from_string(frontend.get("freq_scale"));
  if (frontend.has("fmin_hz"))
    cfg.frontend.fmin_hz = detail::parse_double(frontend.get("fmin_hz"), "fmin_hz");
  if (frontend.has("fmax_hz"))
    cfg.frontend.fmax_hz = detail::parse_double(frontend.get("fmax_hz"), "fmax_hz");

  if (pcen_kv.has("s")) cfg.pcen.s = detail::parse_double(pcen_kv.get("s"), "s");
  if (pcen_kv.has("epsilon"))
    cfg.pcen.epsilon = detail::parse_double(pcen_kv.get("epsilon"), "epsilon");
  if (pcen_kv.has("alpha")) cfg.pcen.alpha = detail::parse_double(pcen_kv.get("alpha"), "alpha");
  if (pcen_kv.has("delta")) cfg.pcen.delta = detail::parse_double(pcen_kv.get("delta"), "delta");
  if (pcen_kv.has("r")) cfg.pcen.r = detail::parse_double(pcen_kv.get("r"), "r");

  CorpusConfig& sc = cfg.synthesis;
  if (synth.has("sample_rate"))
    sc.sample_rate = static_cast<int>(detail::parse_int(synth.get("sample_rate"), "sample_rate"));
  if (synth.has("n_calls"))
    sc.n_calls = static_cast<std::size_t>(detail::parse_int(synth.get("n_calls"), "n_calls"));
  if (synth.has("distances_m"))
    sc.distances_m = detail::parse_double_list(synth.get("distances_m"), "distances_m");
  if (synth.has("call_kind")) sc.call.kind = call_kind_from_string(synth.get("call_kind"));
  if (synth.has("call_f_start_hz"))
    sc.call.f_start_hz = detail::parse_double(synth.get("call_f_start_hz"), "call_f_start_hz");
  if (synth.has("call_f_end_hz"))
    sc.call.f_end_hz = detail::parse_double(synth.get("call_f_end_hz"), "call_f_end_hz");
  if (synth.has("call_duration_sec"))
    sc.call.duration_sec = detail::parse_double(synth.get("call_duration_sec"), "call_duration_sec");
  if (synth.has("call_amplitude"))
    sc.call.amplitude = detail::parse_double(synth.get("call_amplitude"), "call_amplitude");
  if (synth.has("call_jitter"))
    sc.call_jitter = detail::parse_double(synth.get("call_jitter"), "call_jitter");
  if (synth.has("clip_duration_sec"))
    sc.clip_duration_sec = detail::parse_double(synth.get("clip_duration_sec"), "clip_duration_sec");
  if (synth.has("snr_db")) sc.snr_db = detail::parse_double(synth.get("snr_db"), "snr_db");
  if (synth.has("reference_distance_m"))
    sc.propagation.reference_distance_m =
        detail::parse_double(synth.get("reference_distance_m"), "reference_distance_m");
  if (synth.has("absorption_db_per_km_at_1khz"))
    sc.propagation.absorption_db_per_km_at_1khz =
        detail::parse_double(synth.get("absorption_db_per_km_at_1khz"), "absorption_db_per_km_at_1khz");
  if (synth.has("absorption_exponent"))
    sc.propagation.absorption_exponent =
        detail::parse_double(synth.get("absorption_exponent"), "absorption_exponent");
  if (synth.has("n_negative_scenes"))
    sc.n_negative_scenes =
        static_cast<std::size_t>(detail::parse_int(synth.get("n_negative_scenes"), "n_negative_scenes"));
  if (synth.has("negative_duration_sec"))
    sc.negative_duration_sec =
        detail::parse_double(synth.get("negative_duration_sec"), "negative_duration_sec");
  if (synth.has("am_period_sec"))
    sc.am_period_sec = detail::parse_double(synth.get("am_period_sec"), "am_period_sec");
  if (synth.has("am_depth")) sc.am_depth = detail::parse_double(synth.get("am_depth"), "am_depth");
  if (synth.has("am_level_scale"))
    sc.am_level_scale = detail::parse_double(synth.get("am_level_scale"), "am_level_scale");
  if (synth.has("seed"))
    sc.seed = static_cast<std::uint64_t>(detail::parse_int(synth.get("seed"), "seed"));

  pipeline.check_all_consumed();
  frontend.check_all_consumed();
  pcen_kv.check_all_consumed();
  synth.check_all_consumed();

  validate(cfg.frontend);
  validate(cfg.pcen);
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file '" + path + "'");
  return config_from_ini(parse_ini(is, path));
}

inline PipelineConfig config_from_string(const std::string& text) {
  std::istringstream is(text);
  return config_from_ini(parse_ini(is, "<string>"));
}

/// Serializes a full configuration; config_from_string(config_to_ini(c))
/// reproduces c exactly (doubles are written with 17 significant digits).
inline std::string config_to_ini(const PipelineConfig& cfg) {
  using detail::format_double;
  std::string out;
  out += "[pipeline]\n";
  out += "preset = " + cfg.preset + "\n";
  out += "detector = " + std::string(to_string(cfg.detector)) + "\n";
  out += "scene_length_sec = " + format_double(cfg.scene_length_sec) + "\n";
  out += "counting = " + std::string(to_string(cfg.counting)) + "\n";
  out += "bin_edges_m = " + detail::format_double_list(cfg.bin_edges_m) + "\n";
  out += "\n[frontend]\n";
  out += "sample_rate = " + std::to_string(cfg.frontend.sample_rate) + "\n";
  out += "window_length = " + std::to_string(cfg.frontend.window_length) + "\n";
  out += "hop_length = " + std::to_string(cfg.frontend.hop_length) + "\n";
  out += "n_bands = " + std::to_string(cfg.frontend.n_bands) + "\n";
  out += "freq_scale = " + std::string(to_string(cfg.frontend.freq_scale)) + "\n";
  out += "fmin_hz = " + format_double(cfg.frontend.fmin_hz) + "\n";
  out += "fmax_hz = " + format_double(cfg.frontend.fmax_hz) + "\n";
  out += "\n[pcen]\n";
  out += "s = " + format_double(cfg.pcen.s) + "\n";
  out += "epsilon = " + format_double(cfg.pcen.epsilon) + "\n";
  out += "alpha = " + format_double(cfg.pcen.alpha) + "\n";
  out += "delta = " + format_double(cfg.pcen.delta) + "\n";
  out += "r = " + format_double(cfg.pcen.r) + "\n";
  const CorpusConfig& sc = cfg.synthesis;
  out += "\n[synthesis]\n";
  out += "sample_rate = " + std::to_string(sc.sample_rate) + "\n";
  out += "n_calls = " + std::to_string(sc.n_calls) + "\n";
  out += "distances_m = " + detail::format_double_list(sc.distances_m) + "\n";
  out += "call_kind = " + std::string(to_string(sc.call.kind)) + "\n";
  out += "call_f_start_hz = " + format_double(sc.call.f_start_hz) + "\n";
  out += "call_f_end_hz = " + format_double(sc.call.f_end_hz) + "\n";
  out += "call_duration_sec = " + format_double(sc.call.duration_sec) + "\n";
  out += "call_amplitude = " + format_double(sc.call.amplitude) + "\n";
  out += "call_jitter = " + format_double(sc.call_jitter) + "\n";
  out += "clip_duration_sec = " + format_double(sc.clip_duration_sec) + "\n";
  out += "snr_db = " + format_double(sc.snr_db) + "\n";
  out += "reference_distance_m = " + format_double(sc.propagation.reference_distance_m) + "\n";
  out += "absorption_db_per_km_at_1khz = " +
         format_double(sc.propagation.absorption_db_per_km_at_1khz) + "\n";
  out += "absorption_exponent = " + format_double(sc.propagation.absorption_exponent) + "\n";
  out += "n_negative_scenes = " + std::to_string(sc.n_negative_scenes) + "\n";
  out += "negative_duration_sec = " + format_double(sc.negative_duration_sec) + "\n";
  out += "am_period_sec = " + format_double(sc.am_period_sec) + "\n";
  out += "am_depth = " + format_double(sc.am_depth) + "\n";
  out += "am_level_scale = " + format_double(sc.am_level_scale) + "\n";
  out += "seed = " + std::to_string(sc.seed) + "\n";
  return out;
}

/// Scene length in frames for the configured frame rate; 0 when scene
/// normalization is disabled.
inline std::size_t scene_length_frames(const PipelineConfig& cfg) {
  if (cfg.scene_length_sec <= 0.0) return 0;
  const double frame_rate =
      static_cast<double>(cfg.frontend.sample_rate) / cfg.frontend.hop_length;
  const auto frames = static_cast<std::size_t>(std::llround(cfg.scene_length_sec * frame_rate));
  return std::max<std::size_t>(frames, 1);
}

}  // namespace pcenflux
