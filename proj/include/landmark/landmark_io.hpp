#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "landmark/landmark.hpp"

namespace landmark {

enum class LandmarkFormat { kCsv, kJson, kTextGrid };

std::optional<LandmarkFormat> parse_format(std::string_view name);
std::string_view format_name(LandmarkFormat f);
/// ".csv", ".json" or ".TextGrid"
std::string_view format_extension(LandmarkFormat f);
std::optional<LandmarkFormat> format_from_path(const std::filesystem::path& p);

/// CSV: header `utt_id,time_s,kind,polarity,salience_db`, one row per event.
/// Times use six decimals; salience uses the shortest round-trip form.
void write_landmarks_csv(std::ostream& out, const LandmarkSequence& seq);
/// The utterance id comes from the rows, or `fallback_id` for an empty file.
LandmarkSequence read_landmarks_csv(std::istream& in, std::string fallback_id = {});

/// JSON array of objects with the CSV column names as keys.
void write_landmarks_json(std::ostream& out, const LandmarkSequence& seq);
LandmarkSequence read_landmarks_json(std::istream& in, std::string fallback_id = {});

/// Praat long-format TextGrid with two point tiers: "landmarks" (marks are
/// event labels such as "g+") and "salience" (marks are salience_db values at
/// the same times). xmax defaults to the last event time.
void write_landmarks_textgrid(std::ostream& out, const LandmarkSequence& seq,
                              std::optional<double> duration_s = std::nullopt);
/// Reads the point tier named "landmarks" (else the first point tier). Salience
/// comes from a parallel "salience" tier when present, otherwise it is 0.
LandmarkSequence read_landmarks_textgrid(std::istream& in, std::string utterance_id = {});

/// Dispatch on file extension; the fallback id is the file stem.
LandmarkSequence read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const LandmarkSequence& seq,
                     LandmarkFormat format, std::optional<double> duration_s = std::nullopt);

}  // namespace landmark
