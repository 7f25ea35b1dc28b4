#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace landmark {

/// Landmark kinds in canonical order g < b < s < f < v.
enum class Kind { g = 0, b = 1, s = 2, f = 3, v = 4 };
inline constexpr std::size_t kNumKinds = 5;
inline constexpr std::array<Kind, kNumKinds> kAllKinds{Kind::g, Kind::b, Kind::s, Kind::f, Kind::v};

enum class Polarity { kOnset, kOffset };

char kind_char(Kind k);
std::optional<Kind> parse_kind(char c);
char polarity_char(Polarity p);  // '+' or '-'
std::optional<Polarity> parse_polarity(char c);
inline std::size_t kind_index(Kind k) { return static_cast<std::size_t>(k); }

struct LandmarkEvent {
  Kind kind = Kind::g;
  Polarity polarity = Polarity::kOnset;
  double time_s = 0.0;
  double salience_db = 0.0;

  bool operator==(const LandmarkEvent&) const = default;
};

/// "g+", "s-", ...
std::string event_label(const LandmarkEvent& e);
/// Parses "g+" style labels; ASCII '-' and U+2212 are both accepted for offsets.
std::optional<std::pair<Kind, Polarity>> parse_event_label(std::string_view label);

/// Orders by time, then kind, then offset before onset (an offset ending one
/// segment precedes an onset starting the next at the same instant).
bool canonical_less(const LandmarkEvent& a, const LandmarkEvent& b);

struct LandmarkSequence {
  std::string utterance_id;
  std::vector<LandmarkEvent> events;

  void sort();
  bool is_sorted() const;

  bool operator==(const LandmarkSequence&) const = default;
};

/// Rounds a time to the microsecond grid every output format can carry.
double quantize_time(double t);

}  // namespace landmark
