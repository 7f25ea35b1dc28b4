#pragma once

#include <vector>

namespace landmark {

/// Rate every detector stage runs at. Band 6 tops out at its Nyquist frequency.
inline constexpr int kCanonicalRateHz = 16000;

/// Mono audio, samples normalized to [-1, 1].
struct SampledSignal {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalRateHz;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate_hz);
  }
};

}  // namespace landmark
