#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "landmark/alignment.hpp"
#include "landmark/detector.hpp"
#include "landmark/landmark.hpp"
#include "landmark/spectral.hpp"

namespace landmark {

/// Phone classes driving the annotation rules. Labels are compared
/// lower-case.
struct PhoneClassTable {
  std::set<std::string, std::less<>> voiced_fricatives;
  std::set<std::string, std::less<>> fricatives;
  std::set<std::string, std::less<>> nasals_l;
  std::set<std::string, std::less<>> stops_affricates;
  std::set<std::string, std::less<>> vowels;
  std::set<std::string, std::less<>> voiced_stops;
  /// Extra labels treated as voiced for g (e.g. w, y, r, hh, hv). Empty by default.
  std::set<std::string, std::less<>> extra_voiced;
  /// Closure symbol -> stop it belongs to (tcl -> t, ...).
  std::vector<std::pair<std::string, std::string>> closures;
  /// Labels known to carry no landmark (silences, glides); never warned about.
  std::set<std::string, std::less<>> known_other;

  static PhoneClassTable timit();

  bool is_voiced(std::string_view label) const;
  /// Stop a closure belongs to, or empty if `label` is not a closure.
  std::string_view closure_stop(std::string_view label) const;
  bool is_stop(std::string_view label) const;
  bool is_known(std::string_view label) const;
};

/// v+/v- for voiced fricatives, f+/f- for fricatives, s+/s- for nasals and [l].
LandmarkSequence label_segmental(const Alignment& align, const PhoneClassTable& table,
                                 std::vector<std::string>* warnings = nullptr);

/// g+/g- at the ends of maximal runs of time-contiguous voiced phones
/// (gaps under 1 ms merge).
LandmarkSequence label_glottal(const Alignment& align, const PhoneClassTable& table);

/// Inputs for energy-guided burst placement.
struct BurstGuide {
  const BandEnergyContours* fine = nullptr;  // fine-pass contours of the utterance
  double step_s = 0.026;                     // rate-of-rise step
};

/// b+/b- per stop or affricate. A closure followed by its release forms one
/// unit whose search window spans both. With a guide, b+ sits at the
/// maximum of the summed band 2-6 rate of rise inside the window and b- at
/// its minimum; without one, b+/b- take the release bounds (or the closure
/// bounds for an unreleased stop).
LandmarkSequence label_bursts(const Alignment& align, const PhoneClassTable& table,
                              const BurstGuide& guide = {});

/// Union of the three rule sets in canonical order.
LandmarkSequence label_reference(const Alignment& align, const PhoneClassTable& table,
                                 const BurstGuide& guide = {},
                                 std::vector<std::string>* warnings = nullptr);

}  // namespace landmark
