#include "run_config.hpp"

#include <fstream>
#include <set>

#include "landmark/error.hpp"

namespace landmark::cli {
namespace {

using nlohmann::json;

json detector_to_json(const DetectorConfig& d) {
  json bands = json::array();
  for (const auto& [lo, hi] : d.bands.bands) bands.push_back({lo, hi});
  return {
      {"method", d.method == SmoothingMethod::kBasic ? "basic" : "advanced"},
      {"bands_hz", bands},
      {"window_s", d.analysis.window_s},
      {"hop_s", d.analysis.hop_s},
      {"fft_size", d.analysis.fft_size},
      {"energy_floor", d.analysis.floor},
      {"coarse_span_s", d.coarse_span_s},
      {"fine_span_s", d.fine_span_s},
      {"coarse_step_s", d.coarse_step_s},
      {"fine_step_s", d.fine_step_s},
      {"coarse_threshold_db", d.coarse_threshold_db},
      {"fine_threshold_db", d.fine_threshold_db},
      {"band_delta_db", d.band_delta_db},
      {"low_band_delta_db", d.low_band_delta_db},
      {"band_vote_min", d.band_vote_min},
      {"align_tolerance_s", d.align_tolerance_s},
      {"simultaneity_s", d.simultaneity_s},
      {"g_exclusion_s", d.g_exclusion_s},
      {"min_event_gap_s", d.min_event_gap_s},
  };
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

DetectorConfig detector_from_json(const json& j, DetectorConfig d) {
  static const std::set<std::string> kKeys{
      "method", "bands_hz", "window_s", "hop_s", "fft_size", "energy_floor", "coarse_span_s", "fine_span_s",
      "coarse_step_s", "fine_step_s", "coarse_threshold_db", "fine_threshold_db", "band_delta_db",
      "low_band_delta_db", "band_vote_min", "align_tolerance_s", "simultaneity_s", "g_exclusion_s",
      "min_event_gap_s"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw ArgumentError("unknown detector config key '" + key + "'");
  }
  if (j.contains("method")) {
    const auto m = j.at("method").get<std::string>();
    if (m == "basic") d.method = SmoothingMethod::kBasic;
    else if (m == "advanced") d.method = SmoothingMethod::kAdvanced;
    else throw ArgumentError("method must be 'basic' or 'advanced', got '" + m + "'");
  }
  if (j.contains("bands_hz")) {
    const auto& b = j.at("bands_hz");
    if (!b.is_array() || b.size() != kNumBands) throw ArgumentError("bands_hz must list exactly 6 [low, high] pairs");
    for (std::size_t i = 0; i < kNumBands; ++i) d.bands.bands[i] = {b[i].at(0).get<double>(), b[i].at(1).get<double>()};
  }
  read_key(j, "window_s", d.analysis.window_s);
  read_key(j, "hop_s", d.analysis.hop_s);
  read_key(j, "fft_size", d.analysis.fft_size);
  read_key(j, "energy_floor", d.analysis.floor);
  read_key(j, "coarse_span_s", d.coarse_span_s);
  read_key(j, "fine_span_s", d.fine_span_s);
  read_key(j, "coarse_step_s", d.coarse_step_s);
  read_key(j, "fine_step_s", d.fine_step_s);
  read_key(j, "coarse_threshold_db", d.coarse_threshold_db);
  read_key(j, "fine_threshold_db", d.fine_threshold_db);
  read_key(j, "band_delta_db", d.band_delta_db);
  read_key(j, "low_band_delta_db", d.low_band_delta_db);
  read_key(j, "band_vote_min", d.band_vote_min);
  read_key(j, "align_tolerance_s", d.align_tolerance_s);
  read_key(j, "simultaneity_s", d.simultaneity_s);
  read_key(j, "g_exclusion_s", d.g_exclusion_s);
  read_key(j, "min_event_gap_s", d.min_event_gap_s);
  d.validate();
  return d;
}

}  // namespace

json to_json(const RunConfig& cfg) {
  json formats = json::array();
  for (LandmarkFormat f : cfg.formats) formats.push_back(std::string(format_name(f)));
  json j = {
      {"output_dir", cfg.output_dir.string()},
      {"utterance_id", cfg.utterance_id},
      {"detector", detector_to_json(cfg.detector)},
      {"formats", formats},
      {"jobs", cfg.jobs},
      {"log_level", cfg.log_level},
      {"resample", cfg.resample},
      {"export_contours", cfg.export_contours},
      {"no_audio", cfg.no_audio},
      {"phn_rate_hz", cfg.phn_rate_hz},
  };
  j["manifest_dir"] = cfg.manifest_dir ? json(cfg.manifest_dir->string()) : json(nullptr);
  j["wav_file"] = cfg.wav_file ? json(cfg.wav_file->string()) : json(nullptr);
  return j;
}

RunConfig from_json(const json& j, RunConfig cfg) {
  static const std::set<std::string> kKeys{"manifest_dir", "wav_file", "utterance_id", "output_dir",
                                           "detector",     "formats",  "jobs",         "log_level",
                                           "resample",     "export_contours", "no_audio", "phn_rate_hz"};
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  try {
    for (const auto& [key, _] : j.items()) {
      if (!kKeys.contains(key)) throw ArgumentError("unknown config key '" + key + "'");
    }
    auto opt_path = [&](const char* key, std::optional<std::filesystem::path>& out) {
      if (!j.contains(key)) return;
      if (j.at(key).is_null()) out.reset();
      else out = j.at(key).get<std::string>();
    };
    opt_path("manifest_dir", cfg.manifest_dir);
    opt_path("wav_file", cfg.wav_file);
    read_key(j, "utterance_id", cfg.utterance_id);
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("detector")) cfg.detector = detector_from_json(j.at("detector"), cfg.detector);
    if (j.contains("formats")) {
      cfg.formats.clear();
      for (const auto& f : j.at("formats")) {
        auto fmt = parse_format(f.get<std::string>());
        if (!fmt) throw ArgumentError("unknown output format '" + f.get<std::string>() + "'");
        cfg.formats.push_back(*fmt);
      }
    }
    read_key(j, "jobs", cfg.jobs);
    read_key(j, "log_level", cfg.log_level);
    read_key(j, "resample", cfg.resample);
    read_key(j, "export_contours", cfg.export_contours);
    read_key(j, "no_audio", cfg.no_audio);
    read_key(j, "phn_rate_hz", cfg.phn_rate_hz);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("bad config value: ") + e.what());
  }
  if (cfg.phn_rate_hz <= 0) throw ArgumentError("phn_rate_hz must be positive");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
  return from_json(j, std::move(base));
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace landmark::cli
