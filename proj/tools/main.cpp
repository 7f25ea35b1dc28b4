// landmark: acoustic landmark extraction, reference labelling and scoring.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "landmark/error.hpp"

namespace {

using landmark::cli::RunConfig;

// Flags that map onto RunConfig. Optionals stay empty unless given, so
// they only override what the config file set.
struct RunFlags {
  std::string config_path;
  std::string manifest;
  std::string wav;
  std::string utt_id;
  std::string out;
  std::vector<std::string> formats;
  std::string method;
  std::optional<unsigned> jobs;
  std::string log_level;
  std::optional<double> coarse_threshold;
  std::optional<double> fine_threshold;
  std::optional<std::size_t> vote_min;
  bool no_resample = false;
  bool export_contours = false;
  bool no_audio = false;
  std::optional<int> phn_rate;
  std::string dump_config;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool label_ref) {
  cmd->add_option("--config", f.config_path, "JSON config file (default: $LANDMARK_CONFIG)");
  cmd->add_option("--manifest", f.manifest, "Kaldi-style data directory with wav.scp [and align.scp]");
  if (!label_ref) {
    cmd->add_option("--wav", f.wav, "Single audio file instead of a manifest");
    cmd->add_option("--utt-id", f.utt_id, "Utterance id for --wav (default: file stem)");
    cmd->add_flag("--export-contours", f.export_contours, "Also write coarse/fine band contours for plotting");
  } else {
    cmd->add_flag("--no-audio", f.no_audio, "Place bursts at segment bounds instead of using the audio");
    cmd->add_option("--phn-rate", f.phn_rate, "Sample rate the .PHN sample indices refer to");
  }
  cmd->add_option("-o,--out", f.out, "Output directory");
  cmd->add_option("--format", f.formats, "Output formats: csv, json, textgrid")->delimiter(',');
  cmd->add_option("--method", f.method, "Smoothing method")->check(CLI::IsMember({"basic", "advanced"}));
  cmd->add_option("-j,--jobs", f.jobs, "Parallel utterances (0 = all cores)");
  cmd->add_option("--log-level", f.log_level, "trace, debug, info, warn, error, off");
  cmd->add_option("--coarse-threshold", f.coarse_threshold, "Coarse-pass peak threshold (dB)");
  cmd->add_option("--fine-threshold", f.fine_threshold, "Fine-pass peak threshold (dB, 5-8)");
  cmd->add_option("--vote-min", f.vote_min, "Bands (of 2-6) that must agree for b/s");
  cmd->add_flag("--no-resample", f.no_resample, "Reject audio that is not at 16 kHz");
  cmd->add_option("--dump-config", f.dump_config, "Write the effective config to this file");
}

RunConfig resolve(const RunFlags& f) {
  RunConfig cfg;
  std::string config_path = f.config_path;
  if (config_path.empty()) {
    if (const char* env = std::getenv(landmark::cli::kConfigEnvVar)) config_path = env;
  }
  if (!config_path.empty()) cfg = landmark::cli::load_config(config_path, cfg);

  if (!f.manifest.empty()) cfg.manifest_dir = f.manifest;
  if (!f.wav.empty()) cfg.wav_file = f.wav;
  if (!f.utt_id.empty()) cfg.utterance_id = f.utt_id;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.formats.empty()) {
    cfg.formats.clear();
    for (const auto& name : f.formats) {
      auto fmt = landmark::parse_format(name);
      if (!fmt) throw landmark::ArgumentError("unknown format '" + name + "'");
      cfg.formats.push_back(*fmt);
    }
  }
  if (f.method == "basic") cfg.detector.method = landmark::SmoothingMethod::kBasic;
  if (f.method == "advanced") cfg.detector.method = landmark::SmoothingMethod::kAdvanced;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (!f.log_level.empty()) cfg.log_level = f.log_level;
  if (f.coarse_threshold) cfg.detector.coarse_threshold_db = *f.coarse_threshold;
  if (f.fine_threshold) cfg.detector.fine_threshold_db = *f.fine_threshold;
  if (f.vote_min) cfg.detector.band_vote_min = *f.vote_min;
  if (f.no_resample) cfg.resample = false;
  if (f.export_contours) cfg.export_contours = true;
  if (f.no_audio) cfg.no_audio = true;
  if (f.phn_rate) cfg.phn_rate_hz = *f.phn_rate;
  cfg.detector.validate();

  if (cfg.output_dir.empty()) throw landmark::ArgumentError("an output directory is required (--out)");
  if (cfg.manifest_dir && cfg.wav_file) throw landmark::ArgumentError("--manifest and --wav are exclusive");
  if (!cfg.manifest_dir && !cfg.wav_file) throw landmark::ArgumentError("--manifest or --wav is required");
  if (!f.dump_config.empty()) landmark::cli::save_config(f.dump_config, cfg);
  return cfg;
}

void set_log_level(const std::string& level) {
  auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off") throw landmark::ArgumentError("unknown log level '" + level + "'");
  spdlog::set_level(lvl);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("landmark"));
  spdlog::set_pattern("[%H:%M:%S] [%l] %v");

  CLI::App app{"Acoustic landmark extraction, reference labelling and evaluation"};
  app.require_subcommand(1);

  RunFlags extract_flags;
  auto* extract = app.add_subcommand("extract", "Detect landmarks in audio");
  add_run_flags(extract, extract_flags, false);

  RunFlags label_flags;
  auto* label = app.add_subcommand("label-ref", "Generate rule-based reference landmarks from alignments");
  add_run_flags(label, label_flags, true);

  landmark::cli::EvalOptions eval_opts;
  bool keep_polarity = false;
  std::optional<double> tolerance;
  auto* eval = app.add_subcommand("eval", "Score hypothesis landmarks against references");
  eval->add_option("--ref", eval_opts.ref_dir, "Reference landmark directory")->required();
  eval->add_option("--hyp", eval_opts.hyp_dir, "Hypothesis landmark directory")->required();
  eval->add_option("-o,--out", eval_opts.output_dir, "Report directory")->required();
  eval->add_option("--tolerance", tolerance, "Also match events in time within this many seconds")
      ->check(CLI::PositiveNumber);
  eval->add_flag("--keep-polarity", keep_polarity, "Score g+ and g- as different tokens");

  landmark::cli::StatsOptions stats_opts;
  std::string split_spec;
  auto* stats = app.add_subcommand("stats", "Landmark kind distribution per split");
  stats->add_option("--dir", stats_opts.landmark_dir, "Landmark directory")->required();
  stats->add_option("--split-spec", split_spec, "File of '<utt-id> <split>' lines");
  stats->add_option("-o,--out", stats_opts.output_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : landmark::cli::kExitUsage;
  }

  try {
    if (extract->parsed() || label->parsed()) {
      const bool is_extract = extract->parsed();
      RunConfig cfg = resolve(is_extract ? extract_flags : label_flags);
      set_log_level(cfg.log_level);
      return is_extract ? landmark::cli::cmd_extract(cfg, std::cout) : landmark::cli::cmd_label_ref(cfg, std::cout);
    }
    if (eval->parsed()) {
      eval_opts.ler.collapse_polarity = !keep_polarity;
      eval_opts.tolerance_s = tolerance;
      return landmark::cli::cmd_eval(eval_opts, std::cout);
    }
    if (!split_spec.empty()) stats_opts.split_spec = split_spec;
    return landmark::cli::cmd_stats(stats_opts, std::cout);
  } catch (const landmark::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return landmark::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return landmark::cli::kExitPartialFailure;
  }
}
