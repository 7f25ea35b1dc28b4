#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace landmark {

struct ManifestEntry {
  std::string utterance_id;
  std::filesystem::path audio_path;
  std::optional<std::filesystem::path> alignment_path;
};

/// Kaldi-style data directory contents, in wav.scp order.
struct DataManifest {
  std::vector<ManifestEntry> entries;
};

/// Reads `wav.scp` and the optional `align.scp` from `dir`. Only plain
/// `utt-id path` lines are accepted; command pipes are rejected. Relative
/// paths are resolved against `dir`. Alignment ids missing from wav.scp are
/// ignored.
DataManifest read_manifest(const std::filesystem::path& dir);

/// Writes `wav.scp` (and `align.scp` when any entry has an alignment).
void write_manifest(const std::filesystem::path& dir, const DataManifest& manifest);

}  // namespace landmark
