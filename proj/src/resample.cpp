#include "landmark/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "landmark/error.hpp"

namespace landmark {
namespace {

double kaiser(double x, double beta) {
  // x in [-1, 1]
  double r = 1.0 - x * x;
  if (r <= 0.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(r)) / std::cyl_bessel_i(0.0, beta);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

SampledSignal resample(const SampledSignal& sig, int target_hz, const ResampleOptions& opts) {
  if (target_hz <= 0) throw ArgumentError("resample: target rate must be positive");
  if (sig.sample_rate_hz <= 0) throw ArgumentError("resample: source rate must be positive");
  if (target_hz == sig.sample_rate_hz) return sig;

  const double ratio = static_cast<double>(target_hz) / sig.sample_rate_hz;
  // Cutoff in cycles per input sample, relative to the input Nyquist.
  const double cutoff = opts.rolloff * std::min(1.0, ratio);
  const double half_width = opts.zero_crossings / cutoff;  // in input samples

  const auto n_in = static_cast<std::ptrdiff_t>(sig.samples.size());
  const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * ratio));

  SampledSignal out;
  out.sample_rate_hz = target_hz;
  out.samples.resize(n_out);
  for (std::size_t n = 0; n < n_out; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
    const auto hi = std::min<std::ptrdiff_t>(n_in - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
    double acc = 0.0;
    double wsum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double d = t - static_cast<double>(j);
      const double w = cutoff * sinc(cutoff * d) * kaiser(d / half_width, opts.kaiser_beta);
      acc += w * sig.samples[static_cast<std::size_t>(j)];
      wsum += w;
    }
    // Renormalising by the tap sum keeps DC exact, including at the edges
    // where the kernel is truncated; it does not depend on the samples, so
    // the operator stays linear.
    out.samples[n] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

}  // namespace landmark
