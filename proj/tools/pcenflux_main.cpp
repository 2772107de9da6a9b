// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Batch front door: detect | calibrate | evaluate | synth.
// Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pcenflux/pcenflux.hpp"

namespace fs = std::filesystem;
using namespace pcenflux;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string detector;
  std::string counting;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out = true) {
  cmd->add_option("--config", opts.config_path, "Config file (INI-style sections)");
  cmd->add_option("--preset", opts.preset, "Parameter preset: avian|marine")
      ->check(CLI::IsMember({"avian", "marine"}));
  cmd->add_option("--detector", opts.detector, "Detection function: sf_avg|sf_max|pcen_max")
      ->check(CLI::IsMember({"sf_avg", "sf_max", "pcen_max"}));
  cmd->add_option("--counting", opts.counting, "False-alarm counting mode: frames|peaks")
      ->check(CLI::IsMember({"frames", "peaks"}));
  if (with_out)
    cmd->add_option("--out", opts.out_dir, "Output directory")->required();
}

PipelineConfig resolve_config(const CommonOpts& opts) {
  PipelineConfig cfg;
  if (!opts.config_path.empty()) {
    if (!opts.preset.empty())
      throw ConfigError("--preset conflicts with --config; set preset inside the config file");
    cfg = load_config(opts.config_path);
  } else {
    cfg = preset_config(opts.preset.empty() ? "avian" : opts.preset);
  }
  if (!opts.detector.empty()) cfg.detector = detector_from_string(opts.detector);
  if (!opts.counting.empty()) cfg.counting = counting_mode_from_string(opts.counting);
  return cfg;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir + "'");
}

std::vector<std::string> sorted_csv_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

void append_config_snapshot(EvalReport& report, const PipelineConfig& cfg) {
  auto& snap = report.config_snapshot;
  snap.emplace_back("preset", cfg.preset);
  snap.emplace_back("detector", to_string(cfg.detector));
  snap.emplace_back("counting", to_string(cfg.counting));
  snap.emplace_back("scene_length_sec", detail::format_double(cfg.scene_length_sec));
  snap.emplace_back("s", detail::format_double(cfg.pcen.s));
  snap.emplace_back("sample_rate", std::to_string(cfg.frontend.sample_rate));
  snap.emplace_back("window_length", std::to_string(cfg.frontend.window_length));
  snap.emplace_back("hop_length", std::to_string(cfg.frontend.hop_length));
  snap.emplace_back("n_bands", std::to_string(cfg.frontend.n_bands));
  snap.emplace_back("freq_scale", to_string(cfg.frontend.freq_scale));
  snap.emplace_back("fmin_hz", detail::format_double(cfg.frontend.fmin_hz));
  snap.emplace_back("fmax_hz", detail::format_double(cfg.frontend.fmax_hz));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os.good()) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// detect: one curve CSV per input WAV
// ---------------------------------------------------------------------------

int cmd_detect(const CommonOpts& opts, std::vector<std::string> files,
               bool save_spectrograms) {
  const PipelineConfig cfg = resolve_config(opts);
  std::sort(files.begin(), files.end());

  std::map<std::string, std::string> stem_to_path;
  for (const std::string& f : files) {
    const std::string stem = fs::path(f).stem().string();
    const auto [it, inserted] = stem_to_path.emplace(stem, f);
    if (!inserted)
      throw ConfigError("inputs '" + it->second + "' and '" + f +
                        "' would both write " + stem + ".csv");
  }

  ensure_directory(opts.out_dir);
  struct Failure {
    std::string path, message;
    bool numeric;
  };
  std::vector<Failure> failures;
  for (const std::string& f : files) {
    try {
      const Waveform w = read_wav(f);
      if (w.sample_rate != cfg.frontend.sample_rate)
        throw ConfigError("sample rate " + std::to_string(w.sample_rate) +
                          " Hz does not match the configured " +
                          std::to_string(cfg.frontend.sample_rate) +
                          " Hz (input is never resampled)");
      const NoveltyCurve curve = detect_curve(w, cfg);
      const std::string stem = fs::path(f).stem().string();
      write_curve_csv((fs::path(opts.out_dir) / (stem + ".csv")).string(), curve);
      if (save_spectrograms)
        write_pcns((fs::path(opts.out_dir) / (stem + ".pcns")).string(),
                   spectrogram(w, cfg.frontend));
    } catch (const NumericError& e) {
      failures.push_back({f, e.what(), true});
    } catch (const std::exception& e) {
      failures.push_back({f, e.what(), false});
    }
  }
  if (failures.empty()) return kExitOk;
  std::cerr << failures.size() << " of " << files.size() << " files failed:\n";
  bool any_numeric = false;
  for (const Failure& f : failures) {
    std::cerr << "  " << f.path << ": " << f.message << "\n";
    any_numeric = any_numeric || f.numeric;
  }
  return any_numeric ? kExitNumeric : kExitIo;
}

// ---------------------------------------------------------------------------
// synth: corpus WAVs + manifest CSV
// ---------------------------------------------------------------------------

int cmd_synth(const CommonOpts& opts, bool seed_given, std::uint64_t seed) {
  PipelineConfig cfg = resolve_config(opts);
  if (seed_given) cfg.synthesis.seed = seed;

  const Corpus corpus = build_corpus(cfg.synthesis);
  ensure_directory(opts.out_dir);
  ensure_directory((fs::path(opts.out_dir) / "clips").string());

  std::vector<ManifestEntry> manifest;
  auto emit = [&](const CorpusClip& clip, bool positive) {
    const std::string rel = "clips/" + clip.clip_id + ".wav";
    write_wav_float32((fs::path(opts.out_dir) / rel).string(), clip.audio);
    ManifestEntry e;
    e.clip_id = clip.clip_id;
    e.kind = clip.kind;
    e.is_positive = positive;
    e.distance_m = clip.distance_m;
    e.seed = clip.seed;
    e.path = rel;
    manifest.push_back(std::move(e));
  };
  for (const CorpusClip& clip : corpus.positives) emit(clip, true);
  for (const CorpusClip& clip : corpus.negatives) emit(clip, false);
  std::sort(manifest.begin(), manifest.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.clip_id < b.clip_id; });
  write_text_file((fs::path(opts.out_dir) / "manifest.csv").string(),
                  manifest_to_csv(manifest));
  std::cout << "wrote " << corpus.positives.size() << " positive and "
            << corpus.negatives.size() << " negative clips to " << opts.out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate: per-bin thresholds JSON from positive curves
// ---------------------------------------------------------------------------

int cmd_calibrate(const CommonOpts& opts, const std::string& manifest_path,
                  const std::string& curves_dir, const std::string& out_path) {
  const PipelineConfig cfg = resolve_config(opts);
  const std::vector<ManifestEntry> manifest = read_manifest_csv(manifest_path);
  const double frame_rate =
      static_cast<double>(cfg.frontend.sample_rate) / cfg.frontend.hop_length;

  std::vector<PositiveClip> positives;
  for (const ManifestEntry& e : manifest) {
    if (!e.is_positive) continue;
    PositiveClip clip;
    clip.clip_id = e.clip_id;
    clip.distance_m = e.distance_m;
    clip.curve.values =
        read_curve_values_csv((fs::path(curves_dir) / (e.clip_id + ".csv")).string());
    clip.curve.frame_rate = frame_rate;
    clip.curve.detector = cfg.detector;
    positives.push_back(std::move(clip));
  }
  if (positives.empty()) throw ConfigError("manifest lists no positive clips");

  std::vector<DistanceBin> bins = bins_from_edges(cfg.bin_edges_m);
  for (const PositiveClip& clip : positives) {
    bool placed = false;
    for (DistanceBin& bin : bins)
      if (clip.distance_m >= bin.lo_m && clip.distance_m < bin.hi_m) {
        bin.clips.push_back(&clip);
        placed = true;
        break;
      }
    if (!placed)
      throw ConfigError("positive clip '" + clip.clip_id + "' at distance " +
                        std::to_string(clip.distance_m) + " m falls outside all bins");
  }
  std::vector<CalibratedBin> calibrated;
  for (const DistanceBin& bin : bins) calibrated.push_back(calibrate_bin(bin));

  write_text_file(out_path,
                  thresholds_to_json(to_string(cfg.detector), calibrated).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate: false alarms + MTBFA report (JSON and CSV)
// ---------------------------------------------------------------------------

int cmd_evaluate(const CommonOpts& opts, const std::string& thresholds_path,
                 const std::string& curves_dir) {
  const PipelineConfig cfg = resolve_config(opts);

  std::ifstream ts(thresholds_path);
  if (!ts) throw IoError("cannot open thresholds file '" + thresholds_path + "'");
  Json tj;
  try {
    ts >> tj;
  } catch (const std::exception& e) {
    throw IoError("malformed thresholds JSON '" + thresholds_path + "': " + e.what());
  }
  const std::string detector_tag = tj.value("detector", std::string(to_string(cfg.detector)));
  if (detector_tag != to_string(cfg.detector))
    throw ConfigError("thresholds were calibrated for detector '" + detector_tag +
                      "' but the configured detector is '" + to_string(cfg.detector) + "'");
  const std::vector<CalibratedBin> calibrated = thresholds_from_json(tj);

  // every configured bin needs a calibrated threshold
  const std::vector<DistanceBin> expected = bins_from_edges(cfg.bin_edges_m);
  for (const DistanceBin& bin : expected) {
    const bool found = std::any_of(calibrated.begin(), calibrated.end(),
                                   [&](const CalibratedBin& c) { return c.lo_m == bin.lo_m; });
    if (!found)
      throw ConfigError("missing threshold for configured bin starting at " +
                        std::to_string(bin.lo_m) + " m");
  }

  const double frame_rate =
      static_cast<double>(cfg.frontend.sample_rate) / cfg.frontend.hop_length;
  std::vector<NoveltyCurve> negatives;
  for (const std::string& path : sorted_csv_files(curves_dir)) {
    NoveltyCurve c;
    c.values = read_curve_values_csv(path);
    c.frame_rate = frame_rate;
    c.detector = cfg.detector;
    negatives.push_back(std::move(c));
  }
  if (negatives.empty())
    throw ConfigError("no negative curve CSVs found in '" + curves_dir + "'");

  EvalReport report = evaluate_with_thresholds(calibrated, negatives, cfg.counting);
  report.detector = detector_tag;
  append_config_snapshot(report, cfg);

  ensure_directory(opts.out_dir);
  write_text_file((fs::path(opts.out_dir) / "report.json").string(),
                  report_to_json(report).dump(2) + "\n");
  write_text_file((fs::path(opts.out_dir) / "report.csv").string(), to_csv(report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-channel energy normalization and spectral-flux sound event detection"};
  app.require_subcommand(1);

  CommonOpts detect_opts;
  std::vector<std::string> detect_files;
  bool save_spectrograms = false;
  CLI::App* detect = app.add_subcommand("detect", "Compute detection curves for WAV files");
  add_common(detect, detect_opts);
  detect->add_flag("--save-spectrograms", save_spectrograms,
                   "Also write each file's spectrogram as a PCNS container");
  detect->add_option("files", detect_files, "Input WAV files (mono)")->required();

  CommonOpts synth_opts;
  std::uint64_t seed = 0;
  bool seed_given = false;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_common(synth, synth_opts);
  CLI::Option* seed_opt = synth->add_option("--seed", seed, "Master corpus seed");

  CommonOpts cal_opts;
  std::string manifest_path, cal_curves, cal_out;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Calibrate per-bin detection thresholds");
  add_common(calibrate, cal_opts, /*with_out=*/false);
  calibrate->add_option("--manifest", manifest_path, "Corpus manifest CSV")->required();
  calibrate->add_option("--curves", cal_curves, "Directory of positive curve CSVs")->required();
  calibrate->add_option("--out", cal_out, "Output thresholds JSON path")->required();

  CommonOpts eval_opts;
  std::string thresholds_path, eval_curves;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Count false alarms and report MTBFA");
  add_common(evaluate, eval_opts);
  evaluate->add_option("--thresholds", thresholds_path, "Thresholds JSON from calibrate")
      ->required();
  evaluate->add_option("--curves", eval_curves, "Directory of negative curve CSVs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*detect) return cmd_detect(detect_opts, detect_files, save_spectrograms);
    if (*synth) {
      seed_given = seed_opt->count() > 0;
      return cmd_synth(synth_opts, seed_given, seed);
    }
    if (*calibrate) return cmd_calibrate(cal_opts, manifest_path, cal_curves, cal_out);
    if (*evaluate) return cmd_evaluate(eval_opts, thresholds_path, eval_curves);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
