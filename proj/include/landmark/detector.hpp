#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "landmark/landmark.hpp"
#include "landmark/signal.hpp"
#include "landmark/spectral.hpp"

namespace landmark {

enum class SmoothingMethod { kBasic, kAdvanced };

struct DetectorConfig {
  BandSpec bands;
  AnalysisConfig analysis;
  SmoothingMethod method = SmoothingMethod::kBasic;

  double coarse_span_s = 0.020;
  double fine_span_s = 0.010;
  double coarse_step_s = 0.050;
  double fine_step_s = 0.026;

  double coarse_threshold_db = 8.0;
  double fine_threshold_db = 5.0;  // valid range [5, 8]
  // Minimum per-band change for the b/s vote and the f/v high-band template.
  double band_delta_db = 6.0;
  // Minimum low-band (2, 3) change in the f/v template; 0 means any change
  // of the right sign.
  double low_band_delta_db = 0.0;
  std::size_t band_vote_min = 3;

  double align_tolerance_s = 0.015;    // coarse/fine peak matching
  double simultaneity_s = 0.020;       // band vote window around the median
  double g_exclusion_s = 0.020;        // b/s candidates this close to a g are dropped
  double min_event_gap_s = 0.005;      // per (kind, polarity) de-duplication

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;
};

/// A supra-threshold extremum of a (signed) rate-of-rise track.
struct Peak {
  std::size_t frame = 0;
  double magnitude = 0.0;  // always positive, in dB

  bool operator==(const Peak&) const = default;
};

enum class Direction { kRise, kFall };

/// Peaks of one band track. Each maximal run of frames with positive signed
/// value contributes its maximum (the middle of tied maxima) when that
/// maximum reaches the threshold.
std::vector<Peak> detect_peaks(std::span<const double> ror, double threshold_db, Direction dir);
std::array<std::vector<Peak>, kNumBands> detect_peaks(const BandMatrix& ror, double threshold_db,
                                                      Direction dir);

/// A coarse peak matched to a fine peak.
struct MatchedPeak {
  std::size_t frame = 0;          // fine-pass frame (event time)
  std::size_t coarse_frame = 0;
  double magnitude = 0.0;         // coarse-pass magnitude

  bool operator==(const MatchedPeak&) const = default;
};

/// Greedy nearest-first matching: candidate (coarse, fine) pairs within
/// tolerance are taken in order of increasing distance, each peak used at
/// most once. Unmatched coarse peaks are dropped. Result is sorted by frame.
std::vector<MatchedPeak> two_pass_match(std::span<const Peak> coarse, std::span<const Peak> fine,
                                        std::size_t tolerance_frames);

/// Everything the rule stages need, computed once per utterance.
struct PassContours {
  BandEnergyContours coarse;
  BandEnergyContours fine;
  BandMatrix coarse_ror;
  BandMatrix fine_ror;
  double duration_s = 0.0;

  const FrameGrid& grid() const { return fine.grid; }
};

PassContours compute_pass_contours(const SampledSignal& sig, const DetectorConfig& cfg);
/// Same, from raw contours (tests plant contours directly).
PassContours compute_pass_contours(const BandEnergyContours& raw, const DetectorConfig& cfg,
                                   double duration_s);

struct VoicingSegmentation {
  std::vector<std::pair<double, double>> voiced_intervals;
  /// g events after pairing cleanup, alternating +, -, ... starting with +.
  std::vector<LandmarkEvent> g_events;

  /// Closed-interval membership.
  bool is_voiced(double t) const;
};

/// Band-1 rises (+g) and falls (-g) confirmed by both passes, sorted by time,
/// before pairing.
std::vector<LandmarkEvent> detect_g(const PassContours& pc, const DetectorConfig& cfg);

/// Greedy left-to-right pairing over time-sorted g events: a leading -g is
/// dropped, consecutive same-polarity events keep the higher salience (the
/// earlier on ties) and a trailing +g closes at `duration_s`.
VoicingSegmentation pair_voicing(std::span<const LandmarkEvent> g_events, double duration_s);

/// Vote-based b/s landmarks (b outside voiced intervals, s inside).
/// Candidates within g_exclusion_s of any entry of `g_events` are dropped.
std::vector<LandmarkEvent> detect_bs(const PassContours& pc, const VoicingSegmentation& voicing,
                                     std::span<const LandmarkEvent> g_events,
                                     const DetectorConfig& cfg);

/// Frication template landmarks (f outside voiced intervals, v inside).
std::vector<LandmarkEvent> detect_fv(const PassContours& pc, const VoicingSegmentation& voicing,
                                     const DetectorConfig& cfg);

/// Full pipeline; input must be at the canonical rate.
LandmarkSequence detect_all(const SampledSignal& sig, const DetectorConfig& cfg = {});
/// Pipeline from precomputed contours.
LandmarkSequence detect_all(const PassContours& pc, const DetectorConfig& cfg);

}  // namespace landmark
