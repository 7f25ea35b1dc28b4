#pragma once

// Constructed speech-like signals with known landmark times, shared by the
// detector tests and the acceptance suite.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "landmark/landmark.hpp"
#include "landmark/signal.hpp"

namespace landmark::synth {

enum class Segment {
  kSilence,          // background noise only
  kVowel,            // harmonic source up to ~4.5 kHz (all bands)
  kNasal,            // harmonics below 400 Hz only (band 1)
  kVoicedFrication,  // harmonics below 400 Hz plus noise above 2.2 kHz
  kVowelBurst,       // vowel plus 1-8 kHz noise burst
  kBurst,            // 1-8 kHz noise
  kMidTone,          // 1.4 kHz tone (bands 2 and 3 only)
  kFrication,        // noise above 2.2 kHz
};

struct Piece {
  Segment kind;
  double duration_s;
};

struct Levels {
  double background_rms = 0.003;
  double harmonic_amplitude = 0.25;  // fundamental amplitude
  double burst_rms = 0.12;
  double frication_rms = 0.10;
  double tone_amplitude = 0.2;
  double f0_hz = 120.0;
  double ramp_s = 0.040;        // tanh transition width (2x its time constant) centred on each boundary
  double ramp_depth_db = 60.0;  // level change when a source switches fully on or off
  double ramp_skew_s = 0.008;    // rising sources lead, falling sources lag, by this much
  double residual_formant_db = -20.0;  // upper harmonics left under voiced frication

  // Optional steady tone added throughout, like mains hum in a recording. It
  // keeps band 1 of the floor from fluctuating the way narrow-band noise does.
  double hum_amplitude = 0.0;
  double hum_hz = 300.0;

  static Levels with_hum() {
    Levels lv;
    lv.hum_amplitude = 0.004;
    return lv;
  }
};

struct Utterance {
  SampledSignal signal;
  std::vector<LandmarkEvent> planted;  // sorted, canonical order
  std::vector<std::pair<double, double>> voiced;
  std::vector<Piece> pieces;
};

/// Renders `pieces` at 16 kHz and lists the landmarks each boundary plants.
Utterance render(const std::vector<Piece>& pieces, const Levels& levels, std::uint64_t seed);

/// Landmarks implied by a boundary between two segment kinds, in the
/// detector's vocabulary (empty when nothing should fire).
std::vector<std::pair<Kind, Polarity>> boundary_landmarks(Segment from, Segment to);

/// Random utterance: silence-separated scenes drawn from the five planted
/// constructions (voiced island, nasal, voiced frication, burst, frication).
Utterance random_utterance(std::mt19937_64& rng, const Levels& levels = {});

/// White noise at the given RMS (deterministic for a seed).
std::vector<double> white_noise(std::size_t n, double rms, std::uint64_t seed);

/// 120 Hz-style harmonic sawtooth: sum of amplitude/k * sin(2 pi k f0 t) for k*f0 < cutoff.
std::vector<double> sawtooth(std::size_t n, double f0_hz, double amplitude, double cutoff_hz, int rate_hz);

}  // namespace landmark::synth
