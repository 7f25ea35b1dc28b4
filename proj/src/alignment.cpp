#include "landmark/alignment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "landmark/error.hpp"

namespace landmark {

void validate(const Alignment& align) {
  for (std::size_t i = 0; i < align.segments.size(); ++i) {
    const PhoneSegment& s = align.segments[i];
    if (!(s.start_s >= 0.0) || !(s.end_s > s.start_s)) {
      throw FormatError("segment " + std::to_string(i + 1) + " ('" + s.label +
                        "') has end before or at start");
    }
    if (i > 0 && s.start_s < align.segments[i - 1].end_s) {
      throw FormatError("segment " + std::to_string(i + 1) + " ('" + s.label +
                        "') overlaps the previous segment");
    }
  }
}

Alignment parse_phn(std::istream& in, int sample_rate_hz, std::string utterance_id) {
  if (sample_rate_hz <= 0) throw ArgumentError("read_phn: sample rate must be positive");
  Alignment align;
  align.utterance_id = std::move(utterance_id);
  const double rate = sample_rate_hz;

  std::string line;
  long long prev_start = -1;
  long long prev_end = -1;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::istringstream ls(line);
    long long start = 0;
    long long end = 0;
    std::string label;
    std::string extra;
    if (!(ls >> start >> end >> label) || (ls >> extra) || start < 0 || end < 0) {
      throw FormatError("line " + std::to_string(line_no) + ": expected '<start> <end> <label>', got '" +
                        line + "'");
    }
    if (end <= start) {
      throw FormatError("line " + std::to_string(line_no) + ": end sample " + std::to_string(end) +
                        " is not after start " + std::to_string(start));
    }
    if (start < prev_start) {
      throw FormatError("line " + std::to_string(line_no) + ": start sample decreases");
    }
    if (start < prev_end) {
      throw FormatError("line " + std::to_string(line_no) + ": segment overlaps the previous one");
    }
    prev_start = start;
    prev_end = end;
    align.segments.push_back({label, static_cast<double>(start) / rate, static_cast<double>(end) / rate});
  }
  return align;
}

Alignment read_phn(const std::filesystem::path& path, int sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open alignment: " + path.string());
  try {
    return parse_phn(in, sample_rate_hz, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void format_phn(std::ostream& out, const Alignment& align, int sample_rate_hz) {
  validate(align);
  for (const PhoneSegment& s : align.segments) {
    out << std::llround(s.start_s * sample_rate_hz) << ' ' << std::llround(s.end_s * sample_rate_hz) << ' '
        << s.label << '\n';
  }
}

void write_phn(const std::filesystem::path& path, const Alignment& align, int sample_rate_hz) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write alignment: " + path.string());
  format_phn(out, align, sample_rate_hz);
}

}  // namespace landmark
