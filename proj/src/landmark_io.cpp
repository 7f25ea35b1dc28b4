#include "landmark/landmark_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "landmark/error.hpp"

namespace landmark {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw FormatError(where + ": invalid number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

LandmarkEvent make_event(std::string_view kind, std::string_view polarity, double time_s, double salience,
                         const std::string& where) {
  if (kind.size() != 1 || polarity.empty()) throw FormatError(where + ": bad kind/polarity");
  auto label = parse_event_label(std::string(kind) + std::string(polarity));
  if (!label) throw FormatError(where + ": unknown landmark '" + std::string(kind) + std::string(polarity) + "'");
  if (time_s < 0.0) throw FormatError(where + ": negative time");
  return {label->first, label->second, time_s, salience};
}

// Extracts the value after "key = " on a TextGrid line, unquoting strings.
std::optional<std::string> textgrid_value(const std::string& line, std::string_view key) {
  auto first = line.find_first_not_of(" \t");
  if (first == std::string::npos || line.compare(first, key.size(), key) != 0) return std::nullopt;
  auto eq = line.find('=', first + key.size());
  if (eq == std::string::npos) return std::nullopt;
  if (line.find_first_not_of(" \t", first + key.size()) != eq) return std::nullopt;
  std::string value = line.substr(eq + 1);
  auto b = value.find_first_not_of(" \t");
  auto e = value.find_last_not_of(" \t\r");
  if (b == std::string::npos) return std::string{};
  value = value.substr(b, e - b + 1);
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    std::string unq;
    for (std::size_t i = 1; i + 1 < value.size(); ++i) {
      unq += value[i];
      if (value[i] == '"' && value[i + 1] == '"') ++i;
    }
    return unq;
  }
  return value;
}

}  // namespace

std::optional<LandmarkFormat> parse_format(std::string_view name) {
  if (name == "csv") return LandmarkFormat::kCsv;
  if (name == "json") return LandmarkFormat::kJson;
  if (name == "textgrid" || name == "TextGrid") return LandmarkFormat::kTextGrid;
  return std::nullopt;
}

std::string_view format_name(LandmarkFormat f) {
  switch (f) {
    case LandmarkFormat::kCsv: return "csv";
    case LandmarkFormat::kJson: return "json";
    case LandmarkFormat::kTextGrid: return "textgrid";
  }
  return "csv";
}

std::string_view format_extension(LandmarkFormat f) {
  switch (f) {
    case LandmarkFormat::kCsv: return ".csv";
    case LandmarkFormat::kJson: return ".json";
    case LandmarkFormat::kTextGrid: return ".TextGrid";
  }
  return ".csv";
}

std::optional<LandmarkFormat> format_from_path(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".csv") return LandmarkFormat::kCsv;
  if (ext == ".json") return LandmarkFormat::kJson;
  if (ext == ".textgrid") return LandmarkFormat::kTextGrid;
  return std::nullopt;
}

void write_landmarks_csv(std::ostream& out, const LandmarkSequence& seq) {
  out << "utt_id,time_s,kind,polarity,salience_db\n";
  for (const LandmarkEvent& e : seq.events) {
    out << seq.utterance_id << ',' << fixed6(e.time_s) << ',' << kind_char(e.kind) << ','
        << polarity_char(e.polarity) << ',' << shortest(e.salience_db) << '\n';
  }
}

LandmarkSequence read_landmarks_csv(std::istream& in, std::string fallback_id) {
  LandmarkSequence seq;
  seq.utterance_id = std::move(fallback_id);
  std::string line;
  bool first_row = true;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("utt_id", 0) == 0) continue;
    const std::string where = "csv line " + std::to_string(line_no);
    auto cols = split(line, ',');
    if (cols.size() != 5) throw FormatError(where + ": expected 5 columns");
    if (first_row) seq.utterance_id = std::string(cols[0]);
    first_row = false;
    seq.events.push_back(make_event(cols[2], cols[3], parse_double(cols[1], where), parse_double(cols[4], where), where));
  }
  return seq;
}

void write_landmarks_json(std::ostream& out, const LandmarkSequence& seq) {
  nlohmann::json arr = nlohmann::json::array();
  for (const LandmarkEvent& e : seq.events) {
    arr.push_back({{"utt_id", seq.utterance_id},
                   {"time_s", e.time_s},
                   {"kind", std::string(1, kind_char(e.kind))},
                   {"polarity", std::string(1, polarity_char(e.polarity))},
                   {"salience_db", e.salience_db}});
  }
  out << arr.dump(1) << '\n';
}

LandmarkSequence read_landmarks_json(std::istream& in, std::string fallback_id) {
  LandmarkSequence seq;
  seq.utterance_id = std::move(fallback_id);
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("landmark json: ") + e.what());
  }
  if (!arr.is_array()) throw FormatError("landmark json: top level must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& obj = arr[i];
    const std::string where = "landmark json element " + std::to_string(i);
    try {
      if (i == 0) seq.utterance_id = obj.at("utt_id").get<std::string>();
      seq.events.push_back(make_event(obj.at("kind").get<std::string>(), obj.at("polarity").get<std::string>(),
                                      obj.at("time_s").get<double>(), obj.value("salience_db", 0.0), where));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return seq;
}

void write_landmarks_textgrid(std::ostream& out, const LandmarkSequence& seq, std::optional<double> duration_s) {
  double xmax = duration_s.value_or(0.0);
  for (const LandmarkEvent& e : seq.events) xmax = std::max(xmax, e.time_s);
  out << "File type = \"ooTextFile\"\n"
      << "Object class = \"TextGrid\"\n\n"
      << "xmin = 0 \n"
      << "xmax = " << fixed6(xmax) << " \n"
      << "tiers? <exists> \n"
      << "size = 2 \n"
      << "item []: \n";
  // Tier 2 carries each point's salience so the file round-trips losslessly.
  auto tier = [&](int index, std::string_view name, auto mark) {
    out << "    item [" << index << "]:\n"
        << "        class = \"TextTier\" \n"
        << "        name = \"" << name << "\" \n"
        << "        xmin = 0 \n"
        << "        xmax = " << fixed6(xmax) << " \n"
        << "        points: size = " << seq.events.size() << " \n";
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
      out << "        points [" << (i + 1) << "]:\n"
          << "            number = " << fixed6(seq.events[i].time_s) << " \n"
          << "            mark = \"" << mark(seq.events[i]) << "\" \n";
    }
  };
  tier(1, "landmarks", [](const LandmarkEvent& e) { return event_label(e); });
  tier(2, "salience", [](const LandmarkEvent& e) { return shortest(e.salience_db); });
}

LandmarkSequence read_landmarks_textgrid(std::istream& in, std::string utterance_id) {
  LandmarkSequence seq;
  seq.utterance_id = std::move(utterance_id);

  struct Point {
    double time;
    std::string mark;
    std::size_t line_no;
  };
  struct Tier {
    std::string name;
    std::vector<Point> points;
  };
  std::vector<Tier> tiers;
  bool in_point_tier = false;
  double pending_time = 0.0;
  bool have_time = false;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string where = "TextGrid line " + std::to_string(line_no);
    if (auto cls = textgrid_value(line, "class")) {
      in_point_tier = *cls == "TextTier";
      if (in_point_tier) tiers.push_back({});
      continue;
    }
    if (!in_point_tier) continue;
    if (auto name = textgrid_value(line, "name")) {
      tiers.back().name = *name;
    } else if (auto num = textgrid_value(line, "number")) {
      pending_time = parse_double(*num, where);
      have_time = true;
    } else if (auto t = textgrid_value(line, "time")) {
      pending_time = parse_double(*t, where);
      have_time = true;
    } else if (auto mark = textgrid_value(line, "mark")) {
      if (!have_time) throw FormatError(where + ": mark without a time");
      tiers.back().points.push_back({pending_time, *mark, line_no});
      have_time = false;
    }
  }
  if (tiers.empty()) throw FormatError("TextGrid has no point tier");
  auto find = [&](std::string_view name) -> const Tier* {
    for (const Tier& t : tiers) {
      if (t.name == name) return &t;
    }
    return nullptr;
  };
  const Tier* chosen = find("landmarks");
  if (chosen == nullptr) chosen = &tiers.front();
  const Tier* salience = find("salience");
  if (salience != nullptr && salience->points.size() != chosen->points.size()) salience = nullptr;

  for (std::size_t i = 0; i < chosen->points.size(); ++i) {
    const Point& p = chosen->points[i];
    auto label = parse_event_label(p.mark);
    if (!label) {
      throw FormatError("TextGrid line " + std::to_string(p.line_no) + ": unknown landmark mark '" + p.mark + "'");
    }
    double sal = 0.0;
    if (salience != nullptr) {
      const Point& q = salience->points[i];
      sal = parse_double(q.mark, "TextGrid line " + std::to_string(q.line_no));
    }
    seq.events.push_back({label->first, label->second, p.time, sal});
  }
  return seq;
}

LandmarkSequence read_landmarks(const std::filesystem::path& path) {
  auto fmt = format_from_path(path);
  if (!fmt) throw FormatError("unknown landmark file type: " + path.string());
  std::ifstream in(path);
  if (!in) throw IoError("cannot open landmark file: " + path.string());
  const std::string id = path.stem().string();
  try {
    switch (*fmt) {
      case LandmarkFormat::kCsv: return read_landmarks_csv(in, id);
      case LandmarkFormat::kJson: return read_landmarks_json(in, id);
      case LandmarkFormat::kTextGrid: return read_landmarks_textgrid(in, id);
    }
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return {};
}

void write_landmarks(const std::filesystem::path& path, const LandmarkSequence& seq, LandmarkFormat format,
                     std::optional<double> duration_s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write landmark file: " + path.string());
  switch (format) {
    case LandmarkFormat::kCsv: write_landmarks_csv(out, seq); break;
    case LandmarkFormat::kJson: write_landmarks_json(out, seq); break;
    case LandmarkFormat::kTextGrid: write_landmarks_textgrid(out, seq, duration_s); break;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace landmark
