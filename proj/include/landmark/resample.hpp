#pragma once

#include "landmark/signal.hpp"

namespace landmark {

struct ResampleOptions {
  // Zero crossings of the sinc kernel on each side, at the narrower of the
  // two rates.
  int zero_crossings = 32;
  double kaiser_beta = 8.6;
  // Passband edge as a fraction of the lower Nyquist frequency.
  double rolloff = 0.95;
};

/// Band-limited (windowed-sinc) sample-rate conversion. When downsampling the
/// kernel cutoff follows the target Nyquist frequency, so the kernel doubles as
/// the anti-aliasing filter. Output length is round(n * target / source).
/// Returns the input unchanged when the rates already match.
SampledSignal resample(const SampledSignal& sig, int target_hz,
                       const ResampleOptions& opts = {});

}  // namespace landmark
