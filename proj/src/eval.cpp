#include "landmark/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "landmark/error.hpp"

namespace landmark {
namespace {

std::size_t token_kind(int token, const LerOptions& opts) {
  return static_cast<std::size_t>(opts.collapse_polarity ? token : token / 2);
}

double ratio(std::size_t num, std::size_t den, std::size_t other_side) {
  if (den == 0) return other_side == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

void finalize_kind(KindTiming& k) {
  k.precision = ratio(k.matched, k.n_hyp, k.n_ref);
  k.recall = ratio(k.matched, k.n_ref, k.n_hyp);
  k.f1 = k.precision + k.recall > 0.0 ? 2.0 * k.precision * k.recall / (k.precision + k.recall) : 0.0;
}

}  // namespace

EvalReport& EvalReport::operator+=(const EvalReport& other) {
  n_ref_tokens += other.n_ref_tokens;
  n_hyp_tokens += other.n_hyp_tokens;
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  for (std::size_t r = 0; r <= kNumKinds; ++r) {
    for (std::size_t h = 0; h <= kNumKinds; ++h) confusion[r][h] += other.confusion[r][h];
  }
  degenerate = n_ref_tokens == 0;
  const double errors = static_cast<double>(substitutions + deletions + insertions);
  ler_percent = 100.0 * errors / static_cast<double>(std::max<std::size_t>(1, n_ref_tokens));
  return *this;
}

std::vector<int> tokenize(const LandmarkSequence& seq, const LerOptions& opts) {
  std::vector<LandmarkEvent> events = seq.events;
  std::stable_sort(events.begin(), events.end(), canonical_less);
  std::vector<int> tokens;
  tokens.reserve(events.size());
  for (const LandmarkEvent& e : events) {
    const int kind = static_cast<int>(kind_index(e.kind));
    tokens.push_back(opts.collapse_polarity ? kind : 2 * kind + (e.polarity == Polarity::kOffset ? 1 : 0));
  }
  return tokens;
}

EditCounts align_tokens(std::span<const int> ref, std::span<const int> hyp, std::vector<std::pair<int, int>>* pairs) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditCounts counts;
  std::vector<std::pair<int, int>> path;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++counts.substitutions;
      path.emplace_back(ref[i - 1], hyp[j - 1]);
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++counts.deletions;
      path.emplace_back(ref[i - 1], -1);
      --i;
    } else {
      ++counts.insertions;
      path.emplace_back(-1, hyp[j - 1]);
      --j;
    }
  }
  if (pairs) {
    std::reverse(path.begin(), path.end());
    *pairs = std::move(path);
  }
  return counts;
}

EvalReport ler(const LandmarkSequence& ref, const LandmarkSequence& hyp, const LerOptions& opts) {
  const std::vector<int> r = tokenize(ref, opts);
  const std::vector<int> h = tokenize(hyp, opts);
  std::vector<std::pair<int, int>> pairs;
  const EditCounts counts = align_tokens(r, h, &pairs);

  EvalReport report;
  for (const auto& [rt, ht] : pairs) {
    const std::size_t row = rt < 0 ? kNumKinds : token_kind(rt, opts);
    const std::size_t col = ht < 0 ? kNumKinds : token_kind(ht, opts);
    ++report.confusion[row][col];
  }
  EvalReport counted;
  counted.n_ref_tokens = r.size();
  counted.n_hyp_tokens = h.size();
  counted.substitutions = counts.substitutions;
  counted.deletions = counts.deletions;
  counted.insertions = counts.insertions;
  counted.confusion = report.confusion;
  EvalReport out;
  out += counted;
  return out;
}

double mean_utterance_ler(std::span<const EvalReport> reports) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const EvalReport& r : reports) {
    if (r.degenerate) continue;
    sum += r.ler_percent;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

TimingReport& TimingReport::operator+=(const TimingReport& other) {
  tolerance_s = other.tolerance_s;
  for (std::size_t k = 0; k < kNumKinds; ++k) {
    per_kind[k].n_ref += other.per_kind[k].n_ref;
    per_kind[k].n_hyp += other.per_kind[k].n_hyp;
    per_kind[k].matched += other.per_kind[k].matched;
  }
  abs_error_sum_s += other.abs_error_sum_s;
  finalize();
  return *this;
}

void TimingReport::finalize() {
  overall = {};
  for (KindTiming& k : per_kind) {
    finalize_kind(k);
    overall.n_ref += k.n_ref;
    overall.n_hyp += k.n_hyp;
    overall.matched += k.matched;
  }
  finalize_kind(overall);
  mean_abs_error_s = overall.matched > 0 ? abs_error_sum_s / static_cast<double>(overall.matched) : 0.0;
}

TimingReport timing_match(const LandmarkSequence& ref, const LandmarkSequence& hyp, double tolerance_s) {
  if (!(tolerance_s > 0.0)) throw ArgumentError("timing_match: tolerance must be positive");
  TimingReport report;
  report.tolerance_s = tolerance_s;
  for (Kind kind : kAllKinds) {
    for (Polarity pol : {Polarity::kOnset, Polarity::kOffset}) {
      std::vector<double> r, h;
      for (const LandmarkEvent& e : ref.events) {
        if (e.kind == kind && e.polarity == pol) r.push_back(e.time_s);
      }
      for (const LandmarkEvent& e : hyp.events) {
        if (e.kind == kind && e.polarity == pol) h.push_back(e.time_s);
      }
      std::vector<std::tuple<double, std::size_t, std::size_t>> cands;
      for (std::size_t i = 0; i < r.size(); ++i) {
        for (std::size_t j = 0; j < h.size(); ++j) {
          const double d = std::abs(r[i] - h[j]);
          if (d <= tolerance_s + 1e-12) cands.emplace_back(d, i, j);
        }
      }
      std::sort(cands.begin(), cands.end());
      std::vector<bool> ref_used(r.size(), false), hyp_used(h.size(), false);
      KindTiming& kt = report.per_kind[kind_index(kind)];
      kt.n_ref += r.size();
      kt.n_hyp += h.size();
      for (const auto& [d, i, j] : cands) {
        if (ref_used[i] || hyp_used[j]) continue;
        ref_used[i] = hyp_used[j] = true;
        ++kt.matched;
        report.abs_error_sum_s += d;
      }
    }
  }
  report.finalize();
  return report;
}

std::size_t DistributionReport::total() const {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  return n;
}

DistributionReport distribution(std::span<const LandmarkSequence> seqs) {
  DistributionReport d;
  for (const LandmarkSequence& s : seqs) {
    for (const LandmarkEvent& e : s.events) ++d.counts[kind_index(e.kind)];
  }
  const std::size_t total = d.total();
  if (total == 0) throw ArgumentError("distribution: no landmark events");
  for (std::size_t k = 0; k < kNumKinds; ++k) {
    d.proportions[k] = static_cast<double>(d.counts[k]) / static_cast<double>(total);
  }
  return d;
}

}  // namespace landmark
