// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pcenflux/error.hpp"
#include "pcenflux/fft.hpp"
#include "pcenflux/types.hpp"

namespace pcenflux {

// ---------------------------------------------------------------------------
// Deterministic random numbers. mt19937_64 output is pinned by the standard;
// the uniform/gaussian mappings are hand-rolled so streams are reproducible
// bit-for-bit on any platform.
// ---------------------------------------------------------------------------

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Stream seed derived from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0xA0761D6478BD642Full * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

/// splitmix64-based generator with a Box-Muller gaussian.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rng

// ---------------------------------------------------------------------------
// Propagation: spherical spreading plus frequency-dependent absorption.
// ---------------------------------------------------------------------------

/// Absorption follows a(f) = a1k * (f / 1 kHz)^exponent dB/km. The default
/// exponent log10(20) ~= 1.301 makes the model hit 5 dB/km at 1 kHz and
/// 100 dB/km at 10 kHz simultaneously; a strict quadratic law (exponent 2)
/// is available via quadratic().
struct PropagationModel {
  double reference_distance_m = 1.0;
  double absorption_db_per_km_at_1khz = 5.0;
  double absorption_exponent = 1.3010299956639813;  // log10(20)

  static PropagationModel calibrated_default() { return {}; }

  static PropagationModel quadratic() {
    PropagationModel m;
    m.absorption_exponent = 2.0;
    return m;
  }

  double absorption_db_per_km(double hz) const {
    if (hz <= 0.0) return 0.0;
    return absorption_db_per_km_at_1khz * std::pow(hz / 1000.0, absorption_exponent);
  }
};

inline void validate(const PropagationModel& m) {
  if (!(m.reference_distance_m > 0.0))
    throw ConfigError("propagation reference_distance must be positive");
  if (m.absorption_db_per_km_at_1khz < 0.0)
    throw ConfigError("absorption coefficient must be >= 0");
}

/// Applies 1/d spreading relative to the reference distance, then zero-phase
/// frequency-domain absorption over the whole signal.
inline Waveform attenuate(const Waveform& w, const PropagationModel& model,
                          double distance_m) {
  validate(model);
  validate(w);
  if (distance_m < model.reference_distance_m)
    throw ConfigError("distance " + std::to_string(distance_m) +
                      " m is closer than the model reference distance " +
                      std::to_string(model.reference_distance_m) + " m");
  const double spreading = model.reference_distance_m / distance_m;
  const double km = (distance_m - model.reference_distance_m) / 1000.0;
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = fft::apply_frequency_gain(
      w.samples, w.sample_rate, [&](double hz) {
        return spreading * std::pow(10.0, -model.absorption_db_per_km(hz) * km / 20.0);
      });
  return out;
}

// ---------------------------------------------------------------------------
// Positive-call rendering
// ---------------------------------------------------------------------------

struct CallTemplate {
  enum class Kind { linear_chirp, tone_burst };
  Kind kind = Kind::linear_chirp;
  double f_start_hz = 3000.0;
  double f_end_hz = 8000.0;
  double duration_sec = 0.4;
  double amplitude = 1.0;  // envelope peak, full-scale units
};

inline const char* to_string(CallTemplate::Kind k) {
  return k == CallTemplate::Kind::linear_chirp ? "linear_chirp" : "tone_burst";
}

inline CallTemplate::Kind call_kind_from_string(const std::string& s) {
  if (s == "linear_chirp") return CallTemplate::Kind::linear_chirp;
  if (s == "tone_burst") return CallTemplate::Kind::tone_burst;
  throw ConfigError("unknown call kind '" + s + "' (expected linear_chirp|tone_burst)");
}

/// Linear chirp or constant tone with 5 ms raised-cosine on/off ramps.
inline Waveform render_call(const CallTemplate& tpl, int sample_rate) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  if (!(tpl.duration_sec > 0.0)) throw ConfigError("call duration must be positive");
  const double nyquist = 0.5 * sample_rate;
  const bool chirp = tpl.kind == CallTemplate::Kind::linear_chirp;
  if (!(tpl.f_start_hz > 0.0 && tpl.f_start_hz < nyquist) ||
      (chirp && !(tpl.f_end_hz > 0.0 && tpl.f_end_hz < nyquist)))
    throw ConfigError("call frequencies must lie strictly inside (0, Nyquist)");
  if (tpl.amplitude < 0.0) throw ConfigError("call amplitude must be >= 0");

  const std::size_t n = static_cast<std::size_t>(std::llround(tpl.duration_sec * sample_rate));
  const double ramp_sec = std::min(0.005, tpl.duration_sec / 2.0);
  const double ramp_n = ramp_sec * sample_rate;
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  const double f0 = tpl.f_start_hz;
  const double f1 = tpl.kind == CallTemplate::Kind::tone_burst ? tpl.f_start_hz : tpl.f_end_hz;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double phase = 2.0 * std::numbers::pi *
                         (f0 * t + 0.5 * (f1 - f0) / tpl.duration_sec * t * t);
    double env = 1.0;
    const double di = static_cast<double>(i);
    if (ramp_n > 0.0 && di < ramp_n)
      env = 0.5 - 0.5 * std::cos(std::numbers::pi * di / ramp_n);
    const double from_end = static_cast<double>(n - 1 - i);
    if (ramp_n > 0.0 && from_end < ramp_n)
      env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * from_end / ramp_n));
    out.samples[i] = tpl.amplitude * env * std::sin(phase);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Negative-scene rendering
// ---------------------------------------------------------------------------

struct NoiseScene {
  enum class Kind { white, am_engine, impulse_train };
  Kind kind = Kind::white;
  double duration_sec = 10.0;
  double am_period_sec = 0.128;      // am_engine and impulse_train period
  double modulation_depth = 1.0;     // am_engine, in [0, 1]
  double amplitude = 1.0;
  std::uint64_t seed = 0;
};

inline const char* to_string(NoiseScene::Kind k) {
  switch (k) {
    case NoiseScene::Kind::white: return "white";
    case NoiseScene::Kind::am_engine: return "am_engine";
    default: return "impulse_train";
  }
}

inline NoiseScene::Kind noise_kind_from_string(const std::string& s) {
  if (s == "white") return NoiseScene::Kind::white;
  if (s == "am_engine") return NoiseScene::Kind::am_engine;
  if (s == "impulse_train") return NoiseScene::Kind::impulse_train;
  throw ConfigError("unknown noise kind '" + s + "' (expected white|am_engine|impulse_train)");
}

inline void validate(const NoiseScene& scene) {
  if (!(scene.duration_sec > 0.0)) throw ConfigError("scene duration must be positive");
  if (scene.amplitude < 0.0) throw ConfigError("scene amplitude must be >= 0");
  if (scene.kind == NoiseScene::Kind::am_engine) {
    if (!(scene.am_period_sec >= 0.05 && scene.am_period_sec <= 0.5))
      throw ConfigError("am_engine period must lie in [0.05, 0.5] s, got " +
                        std::to_string(scene.am_period_sec));
    if (!(scene.modulation_depth >= 0.0 && scene.modulation_depth <= 1.0))
      throw ConfigError("modulation depth must lie in [0, 1]");
  }
  if (scene.kind == NoiseScene::Kind::impulse_train && !(scene.am_period_sec > 0.0))
    throw ConfigError("impulse train period must be positive");
}

/// white: seeded gaussian noise.
/// am_engine: one period of seeded gaussian noise tiled periodically (the
///   deterministic engine cycle), multiplied by the square-wave gain
///   1 - depth * (1 + square(2 pi t / period)) / 2, i.e. amplitude
///   alternating between (1 - depth) and full scale every half period.
/// impulse_train: periodic unit impulses, first at period/4.
inline Waveform render_noise(const NoiseScene& scene, int sample_rate) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  validate(scene);
  const std::size_t n =
      static_cast<std::size_t>(std::llround(scene.duration_sec * sample_rate));
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(n, 0.0);
  rng::Generator gen(scene.seed);

  switch (scene.kind) {
    case NoiseScene::Kind::white: {
      for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = scene.amplitude * gen.next_gaussian();
      break;
    }
    case NoiseScene::Kind::am_engine: {
      const double period = scene.am_period_sec * sample_rate;  // samples
      const std::size_t base_n = static_cast<std::size_t>(std::llround(period));
      std::vector<double> base(std::max<std::size_t>(base_n, 1));
      for (double& b : base) b = gen.next_gaussian();
      for (std::size_t i = 0; i < n; ++i) {
        const double phase = std::fmod(static_cast<double>(i), period);
        const double square = phase < 0.5 * period ? 1.0 : -1.0;
        const double gain = 1.0 - scene.modulation_depth * (1.0 + square) / 2.0;
        out.samples[i] = scene.amplitude * gain * base[i % base.size()];
      }
      break;
    }
    case NoiseScene::Kind::impulse_train: {
      const double period = scene.am_period_sec * sample_rate;
      for (double pos = period / 4.0; pos < static_cast<double>(n); pos += period)
        out.samples[static_cast<std::size_t>(pos)] = scene.amplitude;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

struct CorpusConfig {
  int sample_rate = 22050;
  std::size_t n_calls = 30;
  std::vector<double> distances_m = {30.0, 100.0, 200.0, 300.0, 500.0};
  CallTemplate call;
  double call_jitter = 0.02;        // relative frequency jitter per call
  double clip_duration_sec = 0.7;
  double snr_db = 105.0;            // call RMS over its support vs noise RMS,
                                    // evaluated at the reference distance
  PropagationModel propagation;
  std::size_t n_negative_scenes = 10;
  double negative_duration_sec = 600.0;
  double am_period_sec = 0.1;
  double am_depth = 0.99;
  double am_level_scale = 10.0;     // AM scenes louder than the noise floor
  std::uint64_t seed = 0;
};

inline void validate(const CorpusConfig& cfg) {
  if (cfg.sample_rate <= 0) throw ConfigError("corpus sample_rate must be positive");
  if (cfg.distances_m.empty()) throw ConfigError("corpus needs at least one distance");
  for (double d : cfg.distances_m)
    if (d < cfg.propagation.reference_distance_m)
      throw ConfigError("corpus distance " + std::to_string(d) +
                        " m is closer than the propagation reference distance");
  if (!(cfg.clip_duration_sec > 0.0)) throw ConfigError("clip duration must be positive");
  if (cfg.call.duration_sec > cfg.clip_duration_sec)
    throw ConfigError("call duration exceeds clip duration");
  if (cfg.n_negative_scenes == 0) throw ConfigError("corpus needs at least one negative scene");
  if (!(cfg.negative_duration_sec > 0.0))
    throw ConfigError("negative duration must be positive");
  if (!(cfg.call_jitter >= 0.0 && cfg.call_jitter < 0.5))
    throw ConfigError("call_jitter must lie in [0, 0.5)");
  validate(cfg.propagation);
}

struct CorpusClip {
  std::string clip_id;
  std::string kind;
  double distance_m = 0.0;  // meaningful for positives only
  std::uint64_t seed = 0;
  Waveform audio;
};

struct Corpus {
  std::vector<CorpusClip> positives;
  std::vector<CorpusClip> negatives;
  double noise_rms = 0.0;
};

namespace detail {

inline double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace detail

/// Positives: the call template (with per-call frequency jitter) rendered at
/// the reference distance, attenuated to each requested distance, and mixed
/// centered into fresh white noise at the corpus noise floor. The floor is
/// the nominal template's support RMS divided by 10^(snr_db/20), shared with
/// the negative scenes. Negatives alternate white and am_engine scenes.
/// Everything is a pure function of (config, seed).
inline Corpus build_corpus(const CorpusConfig& cfg) {
  validate(cfg);
  Corpus corpus;
  const Waveform nominal = render_call(cfg.call, cfg.sample_rate);
  corpus.noise_rms = detail::rms(nominal.samples) / std::pow(10.0, cfg.snr_db / 20.0);

  const std::size_t clip_n =
      static_cast<std::size_t>(std::llround(cfg.clip_duration_sec * cfg.sample_rate));

  char idbuf[64];
  for (std::size_t c = 0; c < cfg.n_calls; ++c) {
    const std::uint64_t call_seed = rng::derive_seed(cfg.seed, 0x10000 + c);
    rng::Generator jitter_gen(call_seed);
    CallTemplate tpl = cfg.call;
    tpl.f_start_hz *= 1.0 + cfg.call_jitter * (2.0 * jitter_gen.next_double() - 1.0);
    tpl.f_end_hz *= 1.0 + cfg.call_jitter * (2.0 * jitter_gen.next_double() - 1.0);
    const Waveform call = render_call(tpl, cfg.sample_rate);

    for (std::size_t j = 0; j < cfg.distances_m.size(); ++j) {
      const double distance = cfg.distances_m[j];
      const Waveform received = attenuate(call, cfg.propagation, distance);
      const std::uint64_t clip_seed =
          rng::derive_seed(cfg.seed, 0x20000 + c * 1024 + j);
      rng::Generator noise_gen(clip_seed);

      CorpusClip clip;
      std::snprintf(idbuf, sizeof idbuf, "pos%03zu_d%06.0f", c, distance);
      clip.clip_id = idbuf;
      clip.kind = to_string(cfg.call.kind);
      clip.distance_m = distance;
      clip.seed = clip_seed;
      clip.audio.sample_rate = cfg.sample_rate;
      clip.audio.samples.resize(clip_n);
      for (std::size_t i = 0; i < clip_n; ++i)
        clip.audio.samples[i] = corpus.noise_rms * noise_gen.next_gaussian();
      const std::size_t offset = (clip_n - std::min(received.samples.size(), clip_n)) / 2;
      for (std::size_t i = 0; i < received.samples.size() && offset + i < clip_n; ++i)
        clip.audio.samples[offset + i] += received.samples[i];
      corpus.positives.push_back(std::move(clip));
    }
  }

  const double scene_duration = cfg.negative_duration_sec / cfg.n_negative_scenes;
  for (std::size_t k = 0; k < cfg.n_negative_scenes; ++k) {
    NoiseScene scene;
    scene.kind = (k % 2 == 0) ? NoiseScene::Kind::white : NoiseScene::Kind::am_engine;
    scene.duration_sec = scene_duration;
    scene.am_period_sec = cfg.am_period_sec;
    scene.modulation_depth = cfg.am_depth;
    scene.amplitude = scene.kind == NoiseScene::Kind::white
                          ? corpus.noise_rms
                          : corpus.noise_rms * cfg.am_level_scale;
    scene.seed = rng::derive_seed(cfg.seed, 0x30000 + k);

    CorpusClip clip;
    std::snprintf(idbuf, sizeof idbuf, "neg%03zu_%s", k, to_string(scene.kind));
    clip.clip_id = idbuf;
    clip.kind = to_string(scene.kind);
    clip.distance_m = 0.0;
    clip.seed = scene.seed;
    clip.audio = render_noise(scene, cfg.sample_rate);
    corpus.negatives.push_back(std::move(clip));
  }
  return corpus;
}

}  // namespace pcenflux
