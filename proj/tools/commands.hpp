#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "landmark/eval.hpp"
#include "run_config.hpp"

namespace landmark::cli {

enum ExitCode : int { kExitOk = 0, kExitPartialFailure = 1, kExitUsage = 2 };

/// Detects landmarks for every utterance of the manifest (or the single
/// wav_file) and writes `<output_dir>/<utt-id><ext>` per requested format.
/// With export_contours, coarse/fine contours go to `<output_dir>/contours/`.
/// A summary line goes to `out`; failing utterances never stop the batch.
int cmd_extract(const RunConfig& cfg, std::ostream& out);

/// Rule-based reference landmarks from the manifest's alignments, written in
/// the same formats as cmd_extract. Unless no_audio is set the audio guides
/// burst placement.
int cmd_label_ref(const RunConfig& cfg, std::ostream& out);

struct EvalOptions {
  std::filesystem::path ref_dir;
  std::filesystem::path hyp_dir;
  std::filesystem::path output_dir;
  LerOptions ler;
  std::optional<double> tolerance_s;
};

/// Scores every utterance id present in both directories. Writes
/// `eval_report.json` and `eval_report.tsv` (plus `eval_timing.tsv` when a
/// tolerance is given).
int cmd_eval(const EvalOptions& opts, std::ostream& out);

struct StatsOptions {
  std::filesystem::path landmark_dir;
  // `utt-id split` per line; without it every utterance is in split "all".
  std::optional<std::filesystem::path> split_spec;
  std::filesystem::path output_dir;
};

/// Writes `stats_<split>.csv` (`kind,count,proportion`) per split.
int cmd_stats(const StatsOptions& opts, std::ostream& out);

}  // namespace landmark::cli
