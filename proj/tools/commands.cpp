#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "landmark/alignment.hpp"
#include "landmark/error.hpp"
#include "landmark/manifest.hpp"
#include "landmark/ref_labeler.hpp"
#include "landmark/resample.hpp"
#include "landmark/wav.hpp"

namespace landmark::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  std::string utterance_id;
  bool ok = false;
  std::string message;
  std::size_t n_events = 0;
};

// Runs fn(i) for i in [0, n) on `jobs` threads. Each index writes only its
// own slot, so results are independent of scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (jobs <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
}

DataManifest manifest_for(const RunConfig& cfg) {
  if (cfg.manifest_dir) return read_manifest(*cfg.manifest_dir);
  if (cfg.wav_file) {
    std::string id = cfg.utterance_id.empty() ? cfg.wav_file->stem().string() : cfg.utterance_id;
    return DataManifest{{ManifestEntry{id, *cfg.wav_file, std::nullopt}}};
  }
  throw ArgumentError("either a manifest directory or a wav file is required");
}

SampledSignal load_audio(const fs::path& path, const RunConfig& cfg) {
  SampledSignal sig = read_wav(path);
  if (sig.sample_rate_hz == kCanonicalRateHz) return sig;
  if (!cfg.resample) {
    throw ArgumentError(path.string() + ": audio is at " + std::to_string(sig.sample_rate_hz) +
                        " Hz and resampling is disabled");
  }
  return resample(sig, kCanonicalRateHz);
}

void write_outputs(const fs::path& dir, const LandmarkSequence& seq, const std::vector<LandmarkFormat>& formats,
                   double duration_s) {
  for (LandmarkFormat f : formats) {
    write_landmarks(dir / (seq.utterance_id + std::string(format_extension(f))), seq, f, duration_s);
  }
}

void write_contour_files(const fs::path& dir, const std::string& id, const PassContours& pc) {
  const fs::path cdir = dir / "contours";
  fs::create_directories(cdir);
  for (const auto& [name, c] : {std::pair{"coarse", &pc.coarse}, std::pair{"fine", &pc.fine}}) {
    std::ofstream csv(cdir / (id + "." + name + ".csv"));
    write_contours_csv(csv, *c);
    std::ofstream js(cdir / (id + "." + name + ".json"));
    write_contours_json(js, *c);
  }
}

int summarize(const char* command, const std::vector<Outcome>& outcomes, std::ostream& out) {
  std::size_t ok = 0;
  std::size_t events = 0;
  for (const Outcome& o : outcomes) {
    if (o.ok) {
      ++ok;
      events += o.n_events;
    }
  }
  const std::size_t failed = outcomes.size() - ok;
  out << command << ": " << ok << " ok, " << failed << " failed, " << events << " events\n";
  for (const Outcome& o : outcomes) {
    if (!o.ok) out << "FAILED " << o.utterance_id << ": " << o.message << '\n';
  }
  return failed == 0 ? kExitOk : kExitPartialFailure;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// utt-id -> landmark file; CSV wins over JSON over TextGrid for the same id.
std::map<std::string, fs::path> landmark_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::map<std::string, std::pair<int, fs::path>> best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto fmt = format_from_path(entry.path());
    if (!fmt) continue;
    const int rank = static_cast<int>(*fmt);
    const std::string id = entry.path().stem().string();
    auto it = best.find(id);
    if (it == best.end() || rank < it->second.first) best[id] = {rank, entry.path()};
  }
  std::map<std::string, fs::path> out;
  for (auto& [id, v] : best) out.emplace(id, v.second);
  return out;
}

json report_json(const EvalReport& r) {
  json confusion = json::object();
  auto name = [](std::size_t k) { return k == kNumKinds ? std::string("-") : std::string(1, kind_char(kAllKinds[k])); };
  for (std::size_t i = 0; i <= kNumKinds; ++i) {
    json row = json::object();
    for (std::size_t j = 0; j <= kNumKinds; ++j) row[name(j)] = r.confusion[i][j];
    confusion[name(i)] = row;
  }
  return {{"n_ref_tokens", r.n_ref_tokens},
          {"n_hyp_tokens", r.n_hyp_tokens},
          {"substitutions", r.substitutions},
          {"deletions", r.deletions},
          {"insertions", r.insertions},
          {"ler_percent", std::round(r.ler_percent * 100.0) / 100.0},
          {"degenerate", r.degenerate},
          {"confusion", confusion}};
}

json timing_json(const TimingReport& t) {
  auto kind_json = [](const KindTiming& k) {
    return json{{"n_ref", k.n_ref}, {"n_hyp", k.n_hyp}, {"matched", k.matched},
                {"precision", k.precision}, {"recall", k.recall}, {"f1", k.f1}};
  };
  json per_kind = json::object();
  for (Kind k : kAllKinds) per_kind[std::string(1, kind_char(k))] = kind_json(t.per_kind[kind_index(k)]);
  return {{"tolerance_s", t.tolerance_s}, {"overall", kind_json(t.overall)}, {"per_kind", per_kind},
          {"mean_abs_error_s", t.mean_abs_error_s}};
}

}  // namespace

int cmd_extract(const RunConfig& cfg, std::ostream& out) {
  cfg.detector.validate();
  const DataManifest manifest = manifest_for(cfg);
  fs::create_directories(cfg.output_dir);

  std::vector<Outcome> outcomes(manifest.entries.size());
  parallel_for(manifest.entries.size(), cfg.jobs, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    Outcome& o = outcomes[i];
    o.utterance_id = entry.utterance_id;
    try {
      const SampledSignal sig = load_audio(entry.audio_path, cfg);
      const PassContours pc = compute_pass_contours(sig, cfg.detector);
      LandmarkSequence seq = detect_all(pc, cfg.detector);
      seq.utterance_id = entry.utterance_id;
      write_outputs(cfg.output_dir, seq, cfg.formats, sig.duration_s());
      if (cfg.export_contours) write_contour_files(cfg.output_dir, entry.utterance_id, pc);
      o.n_events = seq.events.size();
      o.ok = true;
      spdlog::debug("{}: {} landmarks", entry.utterance_id, seq.events.size());
    } catch (const std::exception& e) {
      o.message = e.what();
      spdlog::error("{}: {}", entry.utterance_id, e.what());
    }
  });
  return summarize("extract", outcomes, out);
}

int cmd_label_ref(const RunConfig& cfg, std::ostream& out) {
  cfg.detector.validate();
  const DataManifest manifest = manifest_for(cfg);
  fs::create_directories(cfg.output_dir);
  const PhoneClassTable table = PhoneClassTable::timit();

  std::vector<Outcome> outcomes(manifest.entries.size());
  parallel_for(manifest.entries.size(), cfg.jobs, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    Outcome& o = outcomes[i];
    o.utterance_id = entry.utterance_id;
    try {
      if (!entry.alignment_path) throw IoError("no alignment listed in align.scp");
      Alignment align = read_phn(*entry.alignment_path, cfg.phn_rate_hz);
      align.utterance_id = entry.utterance_id;

      double duration = align.segments.empty() ? 0.0 : align.segments.back().end_s;
      std::optional<BandEnergyContours> fine;
      if (!cfg.no_audio) {
        const SampledSignal sig = load_audio(entry.audio_path, cfg);
        duration = std::max(duration, sig.duration_s());
        const BandEnergyContours raw = band_energies(sig, cfg.detector.bands, cfg.detector.analysis);
        fine = cfg.detector.method == SmoothingMethod::kBasic ? smooth_basic(raw, cfg.detector.fine_span_s)
                                                              : smooth_advanced(raw, cfg.detector.fine_span_s);
      }
      BurstGuide guide;
      if (fine) guide = {&*fine, cfg.detector.fine_step_s};

      std::vector<std::string> warnings;
      LandmarkSequence seq = label_reference(align, table, guide, &warnings);
      for (const std::string& w : warnings) spdlog::warn("{}", w);
      write_outputs(cfg.output_dir, seq, cfg.formats, duration);
      o.n_events = seq.events.size();
      o.ok = true;
    } catch (const std::exception& e) {
      o.message = e.what();
      spdlog::error("{}: {}", entry.utterance_id, e.what());
    }
  });
  return summarize("label-ref", outcomes, out);
}

int cmd_eval(const EvalOptions& opts, std::ostream& out) {
  const auto ref_files = landmark_files(opts.ref_dir);
  const auto hyp_files = landmark_files(opts.hyp_dir);

  std::vector<std::string> ids, ref_only, hyp_only;
  for (const auto& [id, _] : ref_files) (hyp_files.contains(id) ? ids : ref_only).push_back(id);
  for (const auto& [id, _] : hyp_files) {
    if (!ref_files.contains(id)) hyp_only.push_back(id);
  }
  if (ids.empty()) {
    out << "eval: no utterance ids in common between " << opts.ref_dir.string() << " and "
        << opts.hyp_dir.string() << '\n';
    return kExitPartialFailure;
  }

  EvalReport pooled;
  TimingReport timing;
  std::vector<EvalReport> per_utt;
  std::vector<std::string> scored;
  std::vector<Outcome> failures;
  json utterances = json::array();
  for (const std::string& id : ids) {
    try {
      const LandmarkSequence ref = read_landmarks(ref_files.at(id));
      const LandmarkSequence hyp = read_landmarks(hyp_files.at(id));
      EvalReport r = ler(ref, hyp, opts.ler);
      pooled += r;
      json u = report_json(r);
      u["utt_id"] = id;
      if (opts.tolerance_s) {
        TimingReport t = timing_match(ref, hyp, *opts.tolerance_s);
        timing += t;
        u["timing"] = timing_json(t);
      }
      utterances.push_back(u);
      per_utt.push_back(r);
      scored.push_back(id);
    } catch (const std::exception& e) {
      failures.push_back({id, false, e.what(), 0});
      spdlog::error("{}: {}", id, e.what());
    }
  }

  fs::create_directories(opts.output_dir);
  json report = {{"pooled", report_json(pooled)},
                 {"mean_utterance_ler_percent", std::round(mean_utterance_ler(per_utt) * 100.0) / 100.0},
                 {"collapse_polarity", opts.ler.collapse_polarity},
                 {"utterances", utterances},
                 {"unmatched", {{"ref_only", ref_only}, {"hyp_only", hyp_only}}}};
  json failed = json::array();
  for (const Outcome& f : failures) failed.push_back({{"utt_id", f.utterance_id}, {"error", f.message}});
  report["failed"] = failed;
  if (opts.tolerance_s) report["timing"] = timing_json(timing);
  {
    std::ofstream js(opts.output_dir / "eval_report.json");
    js << report.dump(2) << '\n';
  }
  {
    std::ofstream tsv(opts.output_dir / "eval_report.tsv");
    tsv << "utt_id\tn_ref\tn_hyp\tsub\tdel\tins\tler_percent\n";
    auto row = [&](const std::string& id, const EvalReport& r) {
      tsv << id << '\t' << r.n_ref_tokens << '\t' << r.n_hyp_tokens << '\t' << r.substitutions << '\t'
          << r.deletions << '\t' << r.insertions << '\t' << two_decimals(r.ler_percent) << '\n';
    };
    for (std::size_t i = 0; i < scored.size(); ++i) row(scored[i], per_utt[i]);
    row("TOTAL", pooled);
  }
  if (opts.tolerance_s) {
    std::ofstream tsv(opts.output_dir / "eval_timing.tsv");
    tsv << "kind\tn_ref\tn_hyp\tmatched\tprecision\trecall\tf1\n";
    auto row = [&](const std::string& name, const KindTiming& k) {
      tsv << name << '\t' << k.n_ref << '\t' << k.n_hyp << '\t' << k.matched << '\t' << k.precision << '\t'
          << k.recall << '\t' << k.f1 << '\n';
    };
    for (Kind k : kAllKinds) row(std::string(1, kind_char(k)), timing.per_kind[kind_index(k)]);
    row("all", timing.overall);
  }

  out << "eval: " << scored.size() << " utterances, pooled LER " << two_decimals(pooled.ler_percent) << "% (S="
      << pooled.substitutions << " D=" << pooled.deletions << " I=" << pooled.insertions
      << " N=" << pooled.n_ref_tokens << ")\n";
  if (opts.tolerance_s) {
    out << "timing @" << *opts.tolerance_s << " s: precision " << timing.overall.precision << ", recall "
        << timing.overall.recall << ", f1 " << timing.overall.f1 << '\n';
  }
  for (const auto& id : ref_only) out << "unmatched (ref only): " << id << '\n';
  for (const auto& id : hyp_only) out << "unmatched (hyp only): " << id << '\n';
  for (const Outcome& f : failures) out << "FAILED " << f.utterance_id << ": " << f.message << '\n';
  return failures.empty() ? kExitOk : kExitPartialFailure;
}

int cmd_stats(const StatsOptions& opts, std::ostream& out) {
  const auto files = landmark_files(opts.landmark_dir);
  if (files.empty()) {
    out << "stats: no landmark files in " << opts.landmark_dir.string() << '\n';
    return kExitPartialFailure;
  }

  std::map<std::string, std::string> split_of;
  std::vector<std::string> split_order;
  if (opts.split_spec) {
    std::ifstream in(*opts.split_spec);
    if (!in) throw IoError("cannot open split spec: " + opts.split_spec->string());
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
      std::istringstream ls(line);
      std::string id, split;
      if (!(ls >> id)) continue;
      if (!(ls >> split)) {
        throw FormatError(opts.split_spec->string() + ":" + std::to_string(line_no) + ": expected '<utt-id> <split>'");
      }
      if (std::find(split_order.begin(), split_order.end(), split) == split_order.end()) split_order.push_back(split);
      split_of[id] = split;
    }
  } else {
    split_order.push_back("all");
  }

  std::map<std::string, std::vector<LandmarkSequence>> by_split;
  for (const auto& [id, path] : files) {
    std::string split = "all";
    if (opts.split_spec) {
      auto it = split_of.find(id);
      if (it == split_of.end()) {
        spdlog::warn("{}: not listed in split spec, skipped", id);
        continue;
      }
      split = it->second;
    }
    by_split[split].push_back(read_landmarks(path));
  }

  fs::create_directories(opts.output_dir);
  int status = kExitOk;
  for (const std::string& split : split_order) {
    const auto& seqs = by_split[split];
    std::size_t total = 0;
    for (const auto& s : seqs) total += s.events.size();
    if (total == 0) {
      out << "stats: split '" << split << "' has no landmark events\n";
      status = kExitPartialFailure;
      continue;
    }
    const DistributionReport d = distribution(seqs);
    std::ofstream csv(opts.output_dir / ("stats_" + split + ".csv"));
    csv << "kind,count,proportion\n";
    for (Kind k : kAllKinds) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", d.proportions[kind_index(k)]);
      csv << kind_char(k) << ',' << d.counts[kind_index(k)] << ',' << buf << '\n';
    }
    out << "stats: split '" << split << "': " << seqs.size() << " utterances, " << total << " events\n";
  }
  return status;
}

}  // namespace landmark::cli
