#include "landmark/detector.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "landmark/error.hpp"

namespace landmark {
namespace {

constexpr double kTieEpsilon = 1e-9;

// Band indices (0-based) taking part in each rule.
constexpr std::array<std::size_t, 5> kVoteBands{1, 2, 3, 4, 5};
constexpr std::array<std::size_t, 3> kHighBands{3, 4, 5};
constexpr std::array<std::size_t, 2> kLowBands{1, 2};
constexpr std::size_t kGlottalBand = 0;

struct BandPeak {
  std::size_t frame;
  std::size_t band;
  double magnitude;
};

struct Cluster {
  double time_s;
  std::size_t frame;
  double salience;
};

std::vector<MatchedPeak> confirmed_peaks(const PassContours& pc, std::size_t band, Direction dir,
                                         double coarse_threshold, double fine_threshold,
                                         const DetectorConfig& cfg) {
  auto coarse = detect_peaks(pc.coarse_ror[band], coarse_threshold, dir);
  auto fine = detect_peaks(pc.fine_ror[band], fine_threshold, dir);
  return two_pass_match(coarse, fine, pc.grid().frames_for(cfg.align_tolerance_s));
}

double median_time(std::vector<double> times) {
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

// Groups per-band peaks that lie within +/- window of their median time.
// `accept` decides whether a set of distinct bands forms an event.
template <typename Accept>
std::vector<Cluster> cluster_band_peaks(std::vector<BandPeak> peaks, const FrameGrid& grid, std::size_t window,
                                        Accept accept) {
  std::sort(peaks.begin(), peaks.end(), [](const BandPeak& a, const BandPeak& b) {
    return std::tie(a.frame, a.band) < std::tie(b.frame, b.band);
  });
  std::vector<bool> used(peaks.size(), false);
  std::vector<Cluster> out;

  // Nearest unused peak per band within +/- window of `centre` (ties: earlier).
  auto select = [&](double centre) {
    std::array<std::ptrdiff_t, kNumBands> best;
    best.fill(-1);
    for (std::size_t j = 0; j < peaks.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(static_cast<double>(peaks[j].frame) - centre);
      if (d > static_cast<double>(window)) continue;
      auto& slot = best[peaks[j].band];
      if (slot < 0 || d < std::abs(static_cast<double>(peaks[static_cast<std::size_t>(slot)].frame) - centre)) {
        slot = static_cast<std::ptrdiff_t>(j);
      }
    }
    return best;
  };
  auto bands_of = [](const std::array<std::ptrdiff_t, kNumBands>& sel) {
    std::array<bool, kNumBands> present{};
    for (std::size_t b = 0; b < kNumBands; ++b) present[b] = sel[b] >= 0;
    return present;
  };

  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (used[i]) continue;
    // Seed: peaks in the forward window starting at this one.
    std::vector<double> seed_frames;
    for (std::size_t j = i; j < peaks.size() && peaks[j].frame <= peaks[i].frame + window; ++j) {
      if (!used[j]) seed_frames.push_back(static_cast<double>(peaks[j].frame));
    }
    auto sel = select(median_time(seed_frames));
    if (!accept(bands_of(sel))) continue;

    std::vector<double> frames;
    for (auto j : sel) {
      if (j >= 0) frames.push_back(static_cast<double>(peaks[static_cast<std::size_t>(j)].frame));
    }
    const double centre = median_time(frames);
    sel = select(centre);
    if (!accept(bands_of(sel))) continue;

    frames.clear();
    double salience = 0.0;
    for (auto j : sel) {
      if (j < 0) continue;
      const auto& p = peaks[static_cast<std::size_t>(j)];
      frames.push_back(static_cast<double>(p.frame));
      salience = std::max(salience, p.magnitude);
      used[static_cast<std::size_t>(j)] = true;
    }
    const double frame = median_time(frames);
    const double time = grid.origin_s + frame * grid.hop_s;
    out.push_back({quantize_time(time), static_cast<std::size_t>(std::llround(frame)), salience});
  }
  return out;
}

std::vector<BandPeak> gather(const PassContours& pc, std::span<const std::size_t> bands, Direction dir,
                             const DetectorConfig& cfg) {
  const double coarse_thr = std::max(cfg.coarse_threshold_db, cfg.band_delta_db);
  const double fine_thr = std::max(cfg.fine_threshold_db, cfg.band_delta_db);
  std::vector<BandPeak> all;
  for (std::size_t b : bands) {
    for (const MatchedPeak& m : confirmed_peaks(pc, b, dir, coarse_thr, fine_thr, cfg)) {
      all.push_back({m.frame, b, m.magnitude});
    }
  }
  return all;
}

bool near_any(double t, std::span<const LandmarkEvent> events, double window) {
  return std::any_of(events.begin(), events.end(),
                     [&](const LandmarkEvent& e) { return std::abs(e.time_s - t) <= window + 1e-12; });
}

}  // namespace

void DetectorConfig::validate() const {
  bands.validate();
  if (!(coarse_threshold_db > 0.0)) throw ArgumentError("coarse_threshold_db must be positive");
  if (!(fine_threshold_db >= 5.0 && fine_threshold_db <= 8.0)) {
    throw ArgumentError("fine_threshold_db must lie in [5, 8]");
  }
  if (fine_threshold_db > coarse_threshold_db) {
    throw ArgumentError("fine_threshold_db must not exceed coarse_threshold_db");
  }
  if (band_vote_min < 1 || band_vote_min > kVoteBands.size()) throw ArgumentError("band_vote_min must lie in [1, 5]");
  if (!(band_delta_db > 0.0)) throw ArgumentError("band_delta_db must be positive");
  if (!(low_band_delta_db >= 0.0)) throw ArgumentError("low_band_delta_db must be non-negative");
  if (!(coarse_span_s > 0.0) || !(fine_span_s > 0.0)) throw ArgumentError("smoothing spans must be positive");
  if (!(coarse_step_s >= analysis.hop_s) || !(fine_step_s >= analysis.hop_s)) {
    throw ArgumentError("rate-of-rise steps must be at least one hop");
  }
  if (!(align_tolerance_s >= 0.0) || !(simultaneity_s >= 0.0) || !(g_exclusion_s >= 0.0) ||
      !(min_event_gap_s >= 0.0)) {
    throw ArgumentError("tolerances must be non-negative");
  }
}

std::vector<Peak> detect_peaks(std::span<const double> ror, double threshold_db, Direction dir) {
  const double sign = dir == Direction::kRise ? 1.0 : -1.0;
  std::vector<Peak> peaks;
  std::size_t i = 0;
  while (i < ror.size()) {
    if (!(sign * ror[i] > 0.0)) {
      ++i;
      continue;
    }
    // One excursion of the right sign yields at most one peak, so a higher
    // threshold can only remove peaks, never split one into several.
    std::size_t end = i;
    double best = 0.0;
    while (end < ror.size() && sign * ror[end] > 0.0) {
      best = std::max(best, sign * ror[end]);
      ++end;
    }
    if (best >= threshold_db) {
      std::vector<std::size_t> ties;
      for (std::size_t j = i; j < end; ++j) {
        if (sign * ror[j] >= best - kTieEpsilon) ties.push_back(j);
      }
      peaks.push_back({ties[ties.size() / 2], best});
    }
    i = end;
  }
  return peaks;
}

std::array<std::vector<Peak>, kNumBands> detect_peaks(const BandMatrix& ror, double threshold_db, Direction dir) {
  std::array<std::vector<Peak>, kNumBands> out;
  for (std::size_t b = 0; b < kNumBands; ++b) out[b] = detect_peaks(ror[b], threshold_db, dir);
  return out;
}

std::vector<MatchedPeak> two_pass_match(std::span<const Peak> coarse, std::span<const Peak> fine,
                                        std::size_t tolerance_frames) {
  struct Candidate {
    std::size_t distance, ci, fi;
  };
  std::vector<Candidate> cands;
  for (std::size_t ci = 0; ci < coarse.size(); ++ci) {
    for (std::size_t fi = 0; fi < fine.size(); ++fi) {
      const std::size_t c = coarse[ci].frame;
      const std::size_t f = fine[fi].frame;
      const std::size_t d = c > f ? c - f : f - c;
      if (d <= tolerance_frames) cands.push_back({d, ci, fi});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return std::tie(a.distance, a.ci, a.fi) < std::tie(b.distance, b.ci, b.fi); });
  std::vector<bool> coarse_used(coarse.size(), false);
  std::vector<bool> fine_used(fine.size(), false);
  std::vector<MatchedPeak> out;
  for (const Candidate& c : cands) {
    if (coarse_used[c.ci] || fine_used[c.fi]) continue;
    coarse_used[c.ci] = fine_used[c.fi] = true;
    out.push_back({fine[c.fi].frame, coarse[c.ci].frame, coarse[c.ci].magnitude});
  }
  std::sort(out.begin(), out.end(), [](const MatchedPeak& a, const MatchedPeak& b) {
    return std::tie(a.frame, a.coarse_frame) < std::tie(b.frame, b.coarse_frame);
  });
  return out;
}

PassContours compute_pass_contours(const BandEnergyContours& raw, const DetectorConfig& cfg, double duration_s) {
  PassContours pc;
  if (cfg.method == SmoothingMethod::kBasic) {
    pc.coarse = smooth_basic(raw, cfg.coarse_span_s);
    pc.fine = smooth_basic(raw, cfg.fine_span_s);
  } else {
    pc.coarse = smooth_advanced(raw, cfg.coarse_span_s);
    pc.fine = smooth_advanced(raw, cfg.fine_span_s);
  }
  pc.coarse.pass = Pass::kCoarse;
  pc.fine.pass = Pass::kFine;
  pc.coarse_ror = rate_of_rise(pc.coarse, cfg.coarse_step_s);
  pc.fine_ror = rate_of_rise(pc.fine, cfg.fine_step_s);
  pc.duration_s = duration_s;
  return pc;
}

PassContours compute_pass_contours(const SampledSignal& sig, const DetectorConfig& cfg) {
  cfg.validate();
  if (sig.sample_rate_hz != kCanonicalRateHz) {
    throw ArgumentError("detector input must be at " + std::to_string(kCanonicalRateHz) + " Hz, got " +
                        std::to_string(sig.sample_rate_hz));
  }
  return compute_pass_contours(band_energies(sig, cfg.bands, cfg.analysis), cfg, sig.duration_s());
}

bool VoicingSegmentation::is_voiced(double t) const {
  return std::any_of(voiced_intervals.begin(), voiced_intervals.end(),
                     [t](const auto& iv) { return t >= iv.first && t <= iv.second; });
}

std::vector<LandmarkEvent> detect_g(const PassContours& pc, const DetectorConfig& cfg) {
  std::vector<LandmarkEvent> events;
  for (Direction dir : {Direction::kRise, Direction::kFall}) {
    const Polarity pol = dir == Direction::kRise ? Polarity::kOnset : Polarity::kOffset;
    for (const MatchedPeak& m :
         confirmed_peaks(pc, kGlottalBand, dir, cfg.coarse_threshold_db, cfg.fine_threshold_db, cfg)) {
      events.push_back({Kind::g, pol, quantize_time(pc.grid().frame_time(m.frame)), m.magnitude});
    }
  }
  std::stable_sort(events.begin(), events.end(), canonical_less);
  return events;
}

VoicingSegmentation pair_voicing(std::span<const LandmarkEvent> g_events, double duration_s) {
  std::vector<LandmarkEvent> kept;
  for (const LandmarkEvent& e : g_events) {
    if (kept.empty()) {
      if (e.polarity == Polarity::kOnset) kept.push_back(e);
      continue;
    }
    if (kept.back().polarity == e.polarity) {
      if (e.salience_db > kept.back().salience_db) kept.back() = e;
    } else {
      kept.push_back(e);
    }
  }
  VoicingSegmentation vs;
  vs.g_events = kept;
  for (std::size_t i = 0; i < kept.size(); i += 2) {
    const double end = i + 1 < kept.size() ? kept[i + 1].time_s : std::max(duration_s, kept[i].time_s);
    vs.voiced_intervals.emplace_back(kept[i].time_s, end);
  }
  return vs;
}

std::vector<LandmarkEvent> detect_bs(const PassContours& pc, const VoicingSegmentation& voicing,
                                     std::span<const LandmarkEvent> g_events, const DetectorConfig& cfg) {
  std::vector<LandmarkEvent> events;
  const std::size_t window = pc.grid().frames_for(cfg.simultaneity_s);
  auto vote = [&](const std::array<bool, kNumBands>& present) {
    std::size_t n = 0;
    for (std::size_t b : kVoteBands) n += present[b] ? 1 : 0;
    return n >= cfg.band_vote_min;
  };
  for (Direction dir : {Direction::kRise, Direction::kFall}) {
    const Polarity pol = dir == Direction::kRise ? Polarity::kOnset : Polarity::kOffset;
    // Band peaks that coincide with a g transition belong to it and never
    // vote. Filtering before clustering keeps the outcome from depending on
    // where a cluster's median happens to fall.
    std::vector<BandPeak> peaks = gather(pc, kVoteBands, dir, cfg);
    std::erase_if(peaks, [&](const BandPeak& p) {
      return near_any(pc.grid().frame_time(p.frame), g_events, cfg.g_exclusion_s);
    });
    for (const Cluster& c : cluster_band_peaks(std::move(peaks), pc.grid(), window, vote)) {
      if (near_any(c.time_s, g_events, cfg.g_exclusion_s)) continue;
      const Kind kind = voicing.is_voiced(c.time_s) ? Kind::s : Kind::b;
      events.push_back({kind, pol, c.time_s, c.salience});
    }
  }
  std::stable_sort(events.begin(), events.end(), canonical_less);
  return events;
}

std::vector<LandmarkEvent> detect_fv(const PassContours& pc, const VoicingSegmentation& voicing,
                                     const DetectorConfig& cfg) {
  std::vector<LandmarkEvent> events;
  const std::size_t window = pc.grid().frames_for(cfg.simultaneity_s);
  auto all_high = [](const std::array<bool, kNumBands>& present) {
    return std::all_of(kHighBands.begin(), kHighBands.end(), [&](std::size_t b) { return present[b]; });
  };
  for (Direction dir : {Direction::kRise, Direction::kFall}) {
    const Polarity pol = dir == Direction::kRise ? Polarity::kOnset : Polarity::kOffset;
    // Low bands must move the other way: fall for an onset, rise for an offset.
    const double low_sign = dir == Direction::kRise ? -1.0 : 1.0;
    auto low_ok = [&](std::size_t frame) {
      for (std::size_t b : kLowBands) {
        for (const BandMatrix* ror : {&pc.coarse_ror, &pc.fine_ror}) {
          const double v = low_sign * (*ror)[b][frame];
          const bool ok = cfg.low_band_delta_db > 0.0 ? v >= cfg.low_band_delta_db : v > 0.0;
          if (!ok) return false;
        }
      }
      return true;
    };
    for (const Cluster& c : cluster_band_peaks(gather(pc, kHighBands, dir, cfg), pc.grid(), window, all_high)) {
      if (!low_ok(c.frame)) continue;
      const Kind kind = voicing.is_voiced(c.time_s) ? Kind::v : Kind::f;
      events.push_back({kind, pol, c.time_s, c.salience});
    }
  }
  std::stable_sort(events.begin(), events.end(), canonical_less);
  return events;
}

LandmarkSequence detect_all(const PassContours& pc, const DetectorConfig& cfg) {
  cfg.validate();
  const std::vector<LandmarkEvent> g_raw = detect_g(pc, cfg);
  const VoicingSegmentation voicing = pair_voicing(g_raw, pc.duration_s);
  const std::vector<LandmarkEvent> fv = detect_fv(pc, voicing, cfg);
  std::vector<LandmarkEvent> bs = detect_bs(pc, voicing, g_raw, cfg);
  // The frication template is the more specific rule; it wins over the vote.
  std::erase_if(bs, [&](const LandmarkEvent& e) { return near_any(e.time_s, fv, cfg.simultaneity_s); });

  std::vector<LandmarkEvent> events = voicing.g_events;
  // Per (kind, polarity), peaks closer than the minimum gap keep the stronger one.
  std::vector<LandmarkEvent> rest = fv;
  rest.insert(rest.end(), bs.begin(), bs.end());
  std::stable_sort(rest.begin(), rest.end(), canonical_less);
  std::vector<LandmarkEvent> kept;
  for (const LandmarkEvent& e : rest) {
    auto prev = std::find_if(kept.rbegin(), kept.rend(), [&](const LandmarkEvent& k) {
      return k.kind == e.kind && k.polarity == e.polarity;
    });
    if (prev != kept.rend() && e.time_s - prev->time_s < cfg.min_event_gap_s) {
      if (e.salience_db > prev->salience_db) *prev = e;
      continue;
    }
    kept.push_back(e);
  }
  events.insert(events.end(), kept.begin(), kept.end());

  LandmarkSequence seq;
  seq.events = std::move(events);
  seq.sort();
  return seq;
}

LandmarkSequence detect_all(const SampledSignal& sig, const DetectorConfig& cfg) {
  return detect_all(compute_pass_contours(sig, cfg), cfg);
}

}  // namespace landmark
