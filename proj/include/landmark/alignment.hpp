#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace landmark {

/// One labelled phone, times in seconds.
struct PhoneSegment {
  std::string label;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const PhoneSegment&) const = default;
};

/// Segments are sorted by start time and never overlap. Gaps are allowed.
struct Alignment {
  std::string utterance_id;
  std::vector<PhoneSegment> segments;

  bool operator==(const Alignment&) const = default;
};

/// Parses TIMIT .PHN text (`start_sample end_sample label` per line).
/// Blank lines are skipped. Errors name the 1-based line number.
Alignment parse_phn(std::istream& in, int sample_rate_hz, std::string utterance_id = {});
Alignment read_phn(const std::filesystem::path& path, int sample_rate_hz);

/// Inverse of parse_phn; times are rounded to the nearest sample.
void format_phn(std::ostream& out, const Alignment& align, int sample_rate_hz);
void write_phn(const std::filesystem::path& path, const Alignment& align, int sample_rate_hz);

/// Throws FormatError if segments are unsorted, empty or overlapping.
void validate(const Alignment& align);

}  // namespace landmark
