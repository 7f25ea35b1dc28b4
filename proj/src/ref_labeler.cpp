#include "landmark/ref_labeler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace landmark {
namespace {

// Gaps shorter than this between voiced phones do not break a voiced run.
constexpr double kContiguityTolerance = 0.001;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void emit_pair(LandmarkSequence& seq, Kind kind, double start, double end, double salience = 0.0) {
  seq.events.push_back({kind, Polarity::kOnset, quantize_time(start), salience});
  seq.events.push_back({kind, Polarity::kOffset, quantize_time(end), salience});
}

struct StopUnit {
  double window_start;
  double window_end;
  double release_start;
  double release_end;
};

std::vector<StopUnit> stop_units(const Alignment& align, const PhoneClassTable& table) {
  std::vector<StopUnit> units;
  const auto& segs = align.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string label = lower(segs[i].label);
    if (!table.closure_stop(label).empty()) {
      const bool released = i + 1 < segs.size() && table.stops_affricates.contains(lower(segs[i + 1].label)) &&
                            segs[i + 1].start_s - segs[i].end_s < kContiguityTolerance;
      if (released) {
        units.push_back({segs[i].start_s, segs[i + 1].end_s, segs[i + 1].start_s, segs[i + 1].end_s});
        ++i;
      } else {
        units.push_back({segs[i].start_s, segs[i].end_s, segs[i].start_s, segs[i].end_s});
      }
    } else if (table.stops_affricates.contains(label)) {
      units.push_back({segs[i].start_s, segs[i].end_s, segs[i].start_s, segs[i].end_s});
    }
  }
  return units;
}

}  // namespace

PhoneClassTable PhoneClassTable::timit() {
  PhoneClassTable t;
  t.voiced_fricatives = {"z", "zh", "v", "dh"};
  t.fricatives = {"s", "sh", "f", "th"};
  t.nasals_l = {"m", "n", "ng", "em", "en", "eng", "nx", "l"};
  t.stops_affricates = {"b", "d", "g", "p", "t", "k", "dx", "q", "jh", "ch"};
  t.vowels = {"iy", "ih", "eh", "ey", "ae", "aa", "aw", "ay", "ah", "ao",
              "oy", "ow", "uh", "uw", "ux", "er", "ax", "ix", "axr", "ax-h"};
  t.voiced_stops = {"b", "d", "g"};
  t.closures = {{"bcl", "b"}, {"dcl", "d"}, {"gcl", "g"}, {"pcl", "p"}, {"tcl", "t"}, {"kcl", "k"}};
  t.known_other = {"h#", "pau", "epi", "r", "w", "y", "hh", "hv", "el"};
  return t;
}

bool PhoneClassTable::is_voiced(std::string_view label) const {
  return vowels.contains(label) || voiced_fricatives.contains(label) || nasals_l.contains(label) ||
         voiced_stops.contains(label) || extra_voiced.contains(label);
}

std::string_view PhoneClassTable::closure_stop(std::string_view label) const {
  for (const auto& [closure, stop] : closures) {
    if (closure == label) return stop;
  }
  return {};
}

bool PhoneClassTable::is_stop(std::string_view label) const {
  return stops_affricates.contains(label) || !closure_stop(label).empty();
}

bool PhoneClassTable::is_known(std::string_view label) const {
  return is_voiced(label) || fricatives.contains(label) || is_stop(label) || known_other.contains(label);
}

LandmarkSequence label_segmental(const Alignment& align, const PhoneClassTable& table,
                                 std::vector<std::string>* warnings) {
  LandmarkSequence seq;
  seq.utterance_id = align.utterance_id;
  for (const PhoneSegment& s : align.segments) {
    const std::string label = lower(s.label);
    if (table.voiced_fricatives.contains(label)) {
      emit_pair(seq, Kind::v, s.start_s, s.end_s);
    } else if (table.fricatives.contains(label)) {
      emit_pair(seq, Kind::f, s.start_s, s.end_s);
    } else if (table.nasals_l.contains(label)) {
      emit_pair(seq, Kind::s, s.start_s, s.end_s);
    } else if (warnings && !table.is_known(label)) {
      warnings->push_back(align.utterance_id + ": unknown phone label '" + s.label + "' at " +
                          std::to_string(s.start_s) + " s ignored");
    }
  }
  seq.sort();
  return seq;
}

LandmarkSequence label_glottal(const Alignment& align, const PhoneClassTable& table) {
  LandmarkSequence seq;
  seq.utterance_id = align.utterance_id;
  bool in_run = false;
  double run_start = 0.0;
  double run_end = 0.0;
  for (const PhoneSegment& s : align.segments) {
    if (!table.is_voiced(lower(s.label))) {
      if (in_run) emit_pair(seq, Kind::g, run_start, run_end);
      in_run = false;
      continue;
    }
    if (in_run && s.start_s - run_end < kContiguityTolerance) {
      run_end = s.end_s;
      continue;
    }
    if (in_run) emit_pair(seq, Kind::g, run_start, run_end);
    in_run = true;
    run_start = s.start_s;
    run_end = s.end_s;
  }
  if (in_run) emit_pair(seq, Kind::g, run_start, run_end);
  seq.sort();
  return seq;
}

LandmarkSequence label_bursts(const Alignment& align, const PhoneClassTable& table, const BurstGuide& guide) {
  LandmarkSequence seq;
  seq.utterance_id = align.utterance_id;

  std::vector<double> summed;
  if (guide.fine != nullptr && guide.fine->n_frames() > 0) {
    const BandMatrix ror = rate_of_rise(*guide.fine, guide.step_s);
    summed.assign(guide.fine->n_frames(), 0.0);
    for (std::size_t b = 1; b < kNumBands; ++b) {
      for (std::size_t i = 0; i < summed.size(); ++i) summed[i] += ror[b][i];
    }
  }

  for (const StopUnit& u : stop_units(align, table)) {
    if (summed.empty()) {
      emit_pair(seq, Kind::b, u.release_start, u.release_end);
      continue;
    }
    const FrameGrid& grid = guide.fine->grid;
    std::size_t best_rise = summed.size();
    std::size_t best_fall = summed.size();
    for (std::size_t i = 0; i < summed.size(); ++i) {
      const double t = grid.frame_time(i);
      if (t < u.window_start || t > u.window_end) continue;
      if (best_rise == summed.size() || summed[i] > summed[best_rise]) best_rise = i;
      if (best_fall == summed.size() || summed[i] < summed[best_fall]) best_fall = i;
    }
    if (best_rise == summed.size()) {
      emit_pair(seq, Kind::b, u.release_start, u.release_end);
      continue;
    }
    seq.events.push_back({Kind::b, Polarity::kOnset, quantize_time(grid.frame_time(best_rise)), summed[best_rise]});
    seq.events.push_back({Kind::b, Polarity::kOffset, quantize_time(grid.frame_time(best_fall)), -summed[best_fall]});
  }
  seq.sort();
  return seq;
}

LandmarkSequence label_reference(const Alignment& align, const PhoneClassTable& table, const BurstGuide& guide,
                                 std::vector<std::string>* warnings) {
  LandmarkSequence seq;
  seq.utterance_id = align.utterance_id;
  for (const LandmarkSequence& part :
       {label_segmental(align, table, warnings), label_glottal(align, table), label_bursts(align, table, guide)}) {
    seq.events.insert(seq.events.end(), part.events.begin(), part.events.end());
  }
  seq.sort();
  return seq;
}

}  // namespace landmark
