#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "landmark/landmark.hpp"

namespace landmark {

struct LerOptions {
  bool collapse_polarity = true;  // g+ and g- are the same token
  bool use_timing = false;        // reserved; tokens ignore time
};

/// Edit operation counts between two token strings.
struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t total() const { return substitutions + deletions + insertions; }
};

struct EvalReport {
  std::size_t n_ref_tokens = 0;
  std::size_t n_hyp_tokens = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  double ler_percent = 0.0;
  /// Reference was empty: ler_percent = 100 * insertions.
  bool degenerate = false;
  /// confusion[ref][hyp]; row kNumKinds counts insertions (by hyp kind),
  /// column kNumKinds counts deletions (by ref kind).
  std::array<std::array<std::size_t, kNumKinds + 1>, kNumKinds + 1> confusion{};

  /// Adds counts and recomputes ler_percent (corpus pooling).
  EvalReport& operator+=(const EvalReport& other);
};

/// Tokenises a sequence in canonical order; the token is 2*kind + polarity,
/// or just the kind when polarity is collapsed.
std::vector<int> tokenize(const LandmarkSequence& seq, const LerOptions& opts);

/// Minimum edit distance with unit costs. The backtrace prefers substitution
/// (or match) over deletion over insertion so counts are reproducible.
EditCounts align_tokens(std::span<const int> ref, std::span<const int> hyp,
                        std::vector<std::pair<int, int>>* pairs = nullptr);

EvalReport ler(const LandmarkSequence& ref, const LandmarkSequence& hyp, const LerOptions& opts = {});

/// LER as the mean of per-utterance values (non-degenerate utterances only),
/// as an alternative to pooling.
double mean_utterance_ler(std::span<const EvalReport> reports);

struct KindTiming {
  std::size_t n_ref = 0;
  std::size_t n_hyp = 0;
  std::size_t matched = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct TimingReport {
  double tolerance_s = 0.0;
  std::array<KindTiming, kNumKinds> per_kind{};
  KindTiming overall;
  double abs_error_sum_s = 0.0;
  double mean_abs_error_s = 0.0;  // over matched pairs; 0 if none

  TimingReport& operator+=(const TimingReport& other);
  void finalize();
};

/// Per (kind, polarity), greedy matching by increasing |dt| among pairs within
/// tolerance. Precision = matched / hyp, recall = matched / ref; an empty side
/// scores 1 when the other side is empty too, else 0.
TimingReport timing_match(const LandmarkSequence& ref, const LandmarkSequence& hyp, double tolerance_s);

struct DistributionReport {
  std::array<std::size_t, kNumKinds> counts{};
  std::array<double, kNumKinds> proportions{};
  std::size_t total() const;
};

/// Token proportions per kind. Throws ArgumentError when there are no events.
DistributionReport distribution(std::span<const LandmarkSequence> seqs);

}  // namespace landmark
