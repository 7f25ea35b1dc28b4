#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "landmark/signal.hpp"

namespace landmark {

inline constexpr std::size_t kNumBands = 6;

/// Six (low_hz, high_hz) frequency bands. Bands may overlap; a spectrum bin
/// whose centre lies in [low, high) contributes to every band containing it.
struct BandSpec {
  std::array<std::pair<double, double>, kNumBands> bands{{
      {0.0, 400.0},
      {800.0, 1500.0},
      {1200.0, 2000.0},
      {2000.0, 3500.0},
      {3500.0, 5000.0},
      {5000.0, 8000.0},
  }};

  /// Throws ArgumentError unless every band has 0 <= low < high.
  void validate() const;
};

struct AnalysisConfig {
  double window_s = 0.006;  // Hann analysis window
  double hop_s = 0.001;
  std::size_t fft_size = 256;  // zero-padded; must be a power of two >= window
  double floor = 1e-10;        // added to band power before log, i.e. -100 dB
};

/// Frame i is centred at origin_s + i * hop_s.
struct FrameGrid {
  double hop_s = 0.001;
  double window_s = 0.006;
  std::size_t n_frames = 0;
  double origin_s = 0.0;

  double frame_time(std::size_t i) const { return origin_s + static_cast<double>(i) * hop_s; }
  /// Nearest frame to time t, clamped to the grid.
  std::size_t frame_at(double t) const;
  /// Number of frames spanning `seconds`, rounded to nearest.
  std::size_t frames_for(double seconds) const;
};

enum class Smoothing { kRaw, kBasic, kAdvanced };
enum class Pass { kCoarse, kFine };

using BandMatrix = std::array<std::vector<double>, kNumBands>;

/// Per-band log-energy (dB) contours on a shared frame grid.
struct BandEnergyContours {
  FrameGrid grid;
  BandMatrix energy_db;
  Smoothing smoothing = Smoothing::kRaw;
  Pass pass = Pass::kCoarse;

  std::size_t n_frames() const { return grid.n_frames; }
};

/// Short-time band energies. Each frame is Hann-windowed, zero-padded to
/// fft_size and transformed; band energy is the sum of one-sided power bins
/// (normalised so white noise of variance v totals v across all bins), then
/// 10*log10(energy + floor).
///
/// Throws ArgumentError for an invalid config or a signal shorter than one
/// window.
BandEnergyContours band_energies(const SampledSignal& sig, const BandSpec& spec = {},
                                 const AnalysisConfig& cfg = {});

/// Centred moving average over an odd number of frames,
/// round(span_s / hop_s) bumped to the next odd count. Edge frames average
/// over the frames that exist.
BandEnergyContours smooth_basic(const BandEnergyContours& c, double span_s);

/// Weights for smooth_advanced.
class SmoothingKernel {
 public:
  /// Hann window of the given length with non-zero end points
  /// (w[n] = 0.5 - 0.5 cos(2 pi (n + 1) / (len + 1))).
  static SmoothingKernel hanning();
  /// Arbitrary non-negative weights. Throws ArgumentError if any weight is
  /// negative or non-finite, or all are zero.
  static SmoothingKernel custom(std::vector<double> weights);

  bool is_hanning() const { return weights_.empty(); }
  /// Weights for a span of `length` frames (unnormalised).
  std::vector<double> weights(std::size_t length) const;

 private:
  std::vector<double> weights_;
};

/// Convolution with a unit-normalised kernel. A Hann kernel is sized like
/// smooth_basic; a custom kernel keeps its own length. Output has the input
/// length; edge frames renormalise over the kernel taps that overlap the
/// contour.
BandEnergyContours smooth_advanced(const BandEnergyContours& c, double span_s,
                                   const SmoothingKernel& kernel = SmoothingKernel::hanning());

/// ror[b][i] = c[b][i + k] - c[b][i - k], k = round(step_s / (2 hop_s)),
/// indices clamped to the grid. Throws ArgumentError if step_s < hop_s.
BandMatrix rate_of_rise(const BandEnergyContours& c, double step_s);

/// Lower-level helpers shared with the reference labeler.
std::size_t odd_span_frames(double span_s, double hop_s);
std::vector<double> convolve_normalized(std::span<const double> x, std::span<const double> kernel);

/// `frame_time_s,band1_db,...,band6_db` with a header row.
void write_contours_csv(std::ostream& out, const BandEnergyContours& c);
/// {"hop_s":..,"window_s":..,"origin_s":..,"frame_time_s":[..],"bands_db":[[..]x6]}
void write_contours_json(std::ostream& out, const BandEnergyContours& c);

}  // namespace landmark
