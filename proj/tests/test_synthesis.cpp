// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "pcenflux/frontend.hpp"
#include "pcenflux/novelty.hpp"
#include "pcenflux/synthesis.hpp"

using namespace pcenflux;

namespace {

double rms_mid(const std::vector<double>& v) {
  const std::size_t a = v.size() / 4, b = 3 * v.size() / 4;
  double acc = 0.0;
  for (std::size_t i = a; i < b; ++i) acc += v[i] * v[i];
  return std::sqrt(acc / static_cast<double>(b - a));
}

double energy(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

}  // namespace

TEST_CASE("attenuation at the reference distance is the identity") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::tone_burst;
  tpl.f_start_hz = 500.0;
  tpl.duration_sec = 0.2;
  const Waveform w = render_call(tpl, 8000);
  const PropagationModel model = PropagationModel::calibrated_default();
  const Waveform out = attenuate(w, model, model.reference_distance_m);
  REQUIRE(out.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    REQUIRE(out.samples[i] == Approx(w.samples[i]).margin(1e-6));
}

TEST_CASE("one kilometre of absorption at 1 kHz costs five decibels") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::tone_burst;
  tpl.f_start_hz = 1000.0;
  tpl.duration_sec = 1.0;
  const Waveform w = render_call(tpl, 8000);
  PropagationModel model = PropagationModel::calibrated_default();
  model.reference_distance_m = 1000.0;
  const Waveform out = attenuate(w, model, 2000.0);
  const double spreading = 1000.0 / 2000.0;
  const double beyond_spreading_db =
      20.0 * std::log10(rms_mid(out.samples) / rms_mid(w.samples) / spreading);
  REQUIRE(beyond_spreading_db == Approx(-5.0).margin(0.1));
}

TEST_CASE("absorption hits both anchor points under the calibrated default") {
  const PropagationModel model = PropagationModel::calibrated_default();
  REQUIRE(model.absorption_db_per_km(1000.0) <= 5.0 + 1e-12);
  REQUIRE(model.absorption_db_per_km(1000.0) == Approx(5.0));
  const double at_10k = model.absorption_db_per_km(10000.0);
  REQUIRE(at_10k >= 90.0);
  REQUIRE(at_10k <= 110.0);
  // two-point power law through (1 kHz, 5 dB/km) and (10 kHz, 100 dB/km)
  REQUIRE(model.absorption_exponent == Approx(std::log10(100.0 / 5.0) / std::log10(10.0)));
  // the strict quadratic reading stays available
  REQUIRE(PropagationModel::quadratic().absorption_db_per_km(10000.0) == Approx(500.0));
}

TEST_CASE("attenuation is linear in the input") {
  CallTemplate tpl;
  tpl.f_start_hz = 2000.0;
  tpl.f_end_hz = 3000.0;
  tpl.duration_sec = 0.1;
  const Waveform w = render_call(tpl, 22050);
  Waveform w2 = w;
  for (double& v : w2.samples) v *= 2.5;
  const PropagationModel model = PropagationModel::calibrated_default();
  const Waveform a = attenuate(w, model, 100.0);
  const Waveform b = attenuate(w2, model, 100.0);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    REQUIRE(b.samples[i] == Approx(2.5 * a.samples[i]).margin(1e-6));
}

TEST_CASE("received energy strictly decreases with distance") {
  CallTemplate tpl;
  tpl.f_start_hz = 3000.0;
  tpl.f_end_hz = 8000.0;
  tpl.duration_sec = 0.2;
  const Waveform w = render_call(tpl, 22050);
  const PropagationModel model = PropagationModel::calibrated_default();
  double prev = energy(w.samples);
  for (double d : {30.0, 100.0, 200.0, 300.0, 500.0}) {
    const double e = energy(attenuate(w, model, d).samples);
    REQUIRE(e < prev);
    prev = e;
  }
}

TEST_CASE("distances closer than the reference are rejected") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::tone_burst;
  tpl.f_start_hz = 500.0;
  tpl.duration_sec = 0.05;
  const Waveform w = render_call(tpl, 8000);
  PropagationModel model = PropagationModel::calibrated_default();
  model.reference_distance_m = 10.0;
  REQUIRE_THROWS_AS(attenuate(w, model, 5.0), ConfigError);
}

// ---------------------------------------------------------------------------
// call rendering
// ---------------------------------------------------------------------------

TEST_CASE("tone burst concentrates in a stable band near its frequency") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::tone_burst;
  tpl.f_start_hz = 5000.0;
  tpl.duration_sec = 0.1;
  const Waveform w = render_call(tpl, 22050);
  REQUIRE(w.samples.size() == 2205);
  const Spectrogram s = mel_spectrogram(w, avian_spectrogram_config());
  std::size_t first_argmax = 0;
  for (std::size_t t = 0; t < s.n_frames(); ++t) {
    std::size_t argmax = 0;
    for (std::size_t b = 1; b < s.n_bands(); ++b)
      if (s.values(t, b) > s.values(t, argmax)) argmax = b;
    if (t == 0) first_argmax = argmax;
    REQUIRE(static_cast<std::size_t>(std::abs(int(argmax) - int(first_argmax))) <= 1);
  }
}

TEST_CASE("chirp argmax band never decreases") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::linear_chirp;
  tpl.f_start_hz = 2500.0;
  tpl.f_end_hz = 10000.0;
  tpl.duration_sec = 0.3;
  const Waveform w = render_call(tpl, 22050);
  const Spectrogram s = mel_spectrogram(w, avian_spectrogram_config());
  std::size_t prev = 0;
  for (std::size_t t = 0; t < s.n_frames(); ++t) {
    std::size_t argmax = 0;
    for (std::size_t b = 1; b < s.n_bands(); ++b)
      if (s.values(t, b) > s.values(t, argmax)) argmax = b;
    REQUIRE(argmax + 2 >= prev);  // allow one band of ripple, never a real drop
    prev = std::max(prev, argmax);
  }
  REQUIRE(prev > 100);  // reached the top of the range
}

TEST_CASE("zero amplitude renders silence") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::tone_burst;
  tpl.f_start_hz = 1000.0;
  tpl.duration_sec = 0.1;
  tpl.amplitude = 0.0;
  for (double v : render_call(tpl, 8000).samples) REQUIRE(v == 0.0);
}

TEST_CASE("out-of-range frequencies are rejected") {
  CallTemplate tpl;
  tpl.f_start_hz = 5000.0;
  tpl.duration_sec = 0.1;
  REQUIRE_THROWS_AS(render_call(tpl, 8000), ConfigError);  // above Nyquist
  tpl.f_start_hz = 0.0;
  REQUIRE_THROWS_AS(render_call(tpl, 8000), ConfigError);
}

TEST_CASE("call peak amplitude follows the template") {
  CallTemplate tpl;
  tpl.kind = CallTemplate::Kind::tone_burst;
  tpl.f_start_hz = 441.0;
  tpl.duration_sec = 0.5;
  tpl.amplitude = 0.25;
  const Waveform w = render_call(tpl, 22050);
  double peak = 0.0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  REQUIRE(peak == Approx(0.25).epsilon(0.01));
}

// ---------------------------------------------------------------------------
// noise rendering
// ---------------------------------------------------------------------------

TEST_CASE("identical seeds give bit-identical noise") {
  NoiseScene scene;
  scene.kind = NoiseScene::Kind::am_engine;
  scene.duration_sec = 2.0;
  scene.am_period_sec = 0.1;
  scene.modulation_depth = 0.7;
  scene.seed = 99;
  const Waveform a = render_noise(scene, 8000);
  const Waveform b = render_noise(scene, 8000);
  REQUIRE(a.samples == b.samples);
  scene.seed = 100;
  const Waveform c = render_noise(scene, 8000);
  REQUIRE(a.samples != c.samples);
}

TEST_CASE("undepleted modulation leaves the detector curve flat") {
  // depth 0: stationary scene, max-pooled gain control settles down
  const SpectrogramConfig cfg{2000, 128, 128, 65, FreqScale::linear, 0.0, 1000.0};
  NoiseScene scene;
  scene.kind = NoiseScene::Kind::am_engine;
  scene.duration_sec = 30.0;
  scene.am_period_sec = 0.128;
  scene.modulation_depth = 0.0;
  scene.seed = 4;
  const Waveform w = render_noise(scene, cfg.sample_rate);
  const NoveltyCurve c = pcen_max(stft_magnitude(w, cfg), 0.33);
  const std::size_t warmup = 100;
  double mean = 0.0;
  for (std::size_t t = warmup; t < c.values.size(); ++t) mean += c.values[t];
  mean /= static_cast<double>(c.values.size() - warmup);
  double var = 0.0;
  for (std::size_t t = warmup; t < c.values.size(); ++t)
    var += (c.values[t] - mean) * (c.values[t] - mean);
  var /= static_cast<double>(c.values.size() - warmup);
  REQUIRE(std::sqrt(var) < 0.05);
}

TEST_CASE("full-depth modulation alternates frames between loud and silent") {
  const SpectrogramConfig cfg{2000, 128, 128, 65, FreqScale::linear, 0.0, 1000.0};
  NoiseScene scene;
  scene.kind = NoiseScene::Kind::am_engine;
  scene.duration_sec = 4.0;
  scene.am_period_sec = 0.128;  // exactly two hops
  scene.modulation_depth = 1.0;
  scene.seed = 21;
  const Waveform w = render_noise(scene, cfg.sample_rate);
  const Spectrogram s = stft_magnitude(w, cfg);
  // even frames fall in the gated half period: exactly zero
  for (std::size_t t = 0; t < s.n_frames(); t += 2)
    for (std::size_t f = 0; f < s.n_bands(); ++f) REQUIRE(s.values(t, f) == 0.0);
  // odd frames repeat the same engine-cycle spectrum
  for (std::size_t t = 3; t < s.n_frames(); t += 2)
    for (std::size_t f = 0; f < s.n_bands(); ++f)
      REQUIRE(s.values(t, f) == Approx(s.values(1, f)).epsilon(1e-12));
  REQUIRE(s.values.max_value() > 0.0);
}

TEST_CASE("impulse train is periodic and window-aligned") {
  NoiseScene scene;
  scene.kind = NoiseScene::Kind::impulse_train;
  scene.duration_sec = 1.0;
  scene.am_period_sec = 0.128;
  scene.amplitude = 1.0;
  const Waveform w = render_noise(scene, 2000);
  std::size_t count = 0;
  for (double v : w.samples) {
    REQUIRE(v >= 0.0);
    if (v > 0.0) {
      REQUIRE(v == 1.0);
      ++count;
    }
  }
  REQUIRE(count == 8);  // 1 s / 0.128 s, first at period/4
}

TEST_CASE("engine period outside the plausible band is rejected") {
  NoiseScene scene;
  scene.kind = NoiseScene::Kind::am_engine;
  scene.am_period_sec = 0.01;
  REQUIRE_THROWS_AS(render_noise(scene, 8000), ConfigError);
  scene.am_period_sec = 0.9;
  REQUIRE_THROWS_AS(render_noise(scene, 8000), ConfigError);
}

// ---------------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------------

TEST_CASE("zero positives still produce a valid corpus") {
  CorpusConfig cfg;
  cfg.n_calls = 0;
  cfg.n_negative_scenes = 2;
  cfg.negative_duration_sec = 2.0;
  cfg.call.duration_sec = 0.4;
  const Corpus corpus = build_corpus(cfg);
  REQUIRE(corpus.positives.empty());
  REQUIRE(corpus.negatives.size() == 2);
}

TEST_CASE("corpus generation is a pure function of config and seed") {
  CorpusConfig cfg;
  cfg.n_calls = 2;
  cfg.distances_m = {30.0, 100.0};
  cfg.n_negative_scenes = 2;
  cfg.negative_duration_sec = 2.0;
  cfg.seed = 7;
  const Corpus a = build_corpus(cfg);
  const Corpus b = build_corpus(cfg);
  REQUIRE(a.positives.size() == 4);
  for (std::size_t i = 0; i < a.positives.size(); ++i) {
    REQUIRE(a.positives[i].clip_id == b.positives[i].clip_id);
    REQUIRE(a.positives[i].audio.samples == b.positives[i].audio.samples);
  }
  for (std::size_t i = 0; i < a.negatives.size(); ++i)
    REQUIRE(a.negatives[i].audio.samples == b.negatives[i].audio.samples);

  cfg.seed = 8;
  const Corpus c = build_corpus(cfg);
  REQUIRE(a.positives[0].audio.samples != c.positives[0].audio.samples);
}

TEST_CASE("mean detectability decreases with distance") {
  CorpusConfig cfg;
  cfg.n_calls = 4;
  cfg.distances_m = {30.0, 100.0, 300.0};
  cfg.n_negative_scenes = 1;
  cfg.negative_duration_sec = 1.0;
  cfg.seed = 11;
  const Corpus corpus = build_corpus(cfg);
  const SpectrogramConfig fe = avian_spectrogram_config();

  std::vector<double> mean_score(cfg.distances_m.size(), 0.0);
  std::vector<int> count(cfg.distances_m.size(), 0);
  for (const CorpusClip& clip : corpus.positives) {
    const NoveltyCurve c = pcen_max(mel_spectrogram(clip.audio, fe), 0.09);
    double best = 0.0;
    for (std::size_t t = 1; t < c.values.size(); ++t) best = std::max(best, c.values[t]);
    for (std::size_t j = 0; j < cfg.distances_m.size(); ++j)
      if (clip.distance_m == cfg.distances_m[j]) {
        mean_score[j] += best;
        ++count[j];
      }
  }
  for (std::size_t j = 0; j < mean_score.size(); ++j) {
    REQUIRE(count[j] == 4);
    mean_score[j] /= count[j];
  }
  REQUIRE(mean_score[0] > mean_score[1]);
  REQUIRE(mean_score[1] > mean_score[2]);
}
