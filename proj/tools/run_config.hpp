#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "landmark/detector.hpp"
#include "landmark/landmark_io.hpp"

namespace landmark::cli {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "LANDMARK_CONFIG";

struct RunConfig {
  std::optional<std::filesystem::path> manifest_dir;
  std::optional<std::filesystem::path> wav_file;
  std::string utterance_id;  // for wav_file; defaults to the file stem
  std::filesystem::path output_dir;
  DetectorConfig detector;
  std::vector<LandmarkFormat> formats{LandmarkFormat::kCsv};
  unsigned jobs = 0;  // 0: one per hardware thread
  std::string log_level = "info";
  bool resample = true;
  bool export_contours = false;
  // label-ref only
  bool no_audio = false;
  int phn_rate_hz = 16000;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Keys absent from `j` keep their values in `base`. Throws ArgumentError on
/// unknown keys or bad values.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace landmark::cli
