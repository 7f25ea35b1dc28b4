#include "landmark/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "landmark/error.hpp"

namespace landmark {
namespace {

// utt-id -> path lines of a .scp file, in file order.
std::vector<std::pair<std::string, std::string>> read_scp(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto sep = line.find_first_of(" \t", first);
    const std::string where = file.string() + ":" + std::to_string(line_no);
    if (sep == std::string::npos) throw FormatError(where + ": missing path after utterance id");
    std::string id = line.substr(first, sep - first);
    const auto path_begin = line.find_first_not_of(" \t", sep);
    const auto path_end = line.find_last_not_of(" \t");
    if (path_begin == std::string::npos) throw FormatError(where + ": missing path after utterance id");
    std::string path = line.substr(path_begin, path_end - path_begin + 1);
    if (path.back() == '|' || path.find(' ') != std::string::npos || path.find('\t') != std::string::npos) {
      throw FormatError(where + ": only plain paths are supported, got '" + path + "'");
    }
    if (!seen.insert(id).second) throw FormatError(where + ": duplicate utterance id '" + id + "'");
    rows.emplace_back(std::move(id), std::move(path));
  }
  return rows;
}

std::filesystem::path resolve(const std::filesystem::path& dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : dir / path;
}

}  // namespace

DataManifest read_manifest(const std::filesystem::path& dir) {
  const auto wav_scp = dir / "wav.scp";
  if (!std::filesystem::exists(wav_scp)) throw IoError("wav.scp not found in " + dir.string());

  std::map<std::string, std::string> align;
  if (std::filesystem::exists(dir / "align.scp")) {
    for (auto& [id, path] : read_scp(dir / "align.scp")) align.emplace(id, path);
  }

  DataManifest manifest;
  for (auto& [id, path] : read_scp(wav_scp)) {
    ManifestEntry entry{id, resolve(dir, path), std::nullopt};
    if (auto it = align.find(id); it != align.end()) entry.alignment_path = resolve(dir, it->second);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& dir, const DataManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::ofstream wav(dir / "wav.scp");
  if (!wav) throw IoError("cannot write " + (dir / "wav.scp").string());
  bool any_alignment = false;
  for (const ManifestEntry& e : manifest.entries) {
    wav << e.utterance_id << ' ' << e.audio_path.string() << '\n';
    any_alignment = any_alignment || e.alignment_path.has_value();
  }
  if (!any_alignment) return;
  std::ofstream ali(dir / "align.scp");
  if (!ali) throw IoError("cannot write " + (dir / "align.scp").string());
  for (const ManifestEntry& e : manifest.entries) {
    if (e.alignment_path) ali << e.utterance_id << ' ' << e.alignment_path->string() << '\n';
  }
}

}  // namespace landmark
