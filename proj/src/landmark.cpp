#include "landmark/landmark.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace landmark {

char kind_char(Kind k) {
  static constexpr char kChars[] = {'g', 'b', 's', 'f', 'v'};
  return kChars[kind_index(k)];
}

std::optional<Kind> parse_kind(char c) {
  switch (c) {
    case 'g': return Kind::g;
    case 'b': return Kind::b;
    case 's': return Kind::s;
    case 'f': return Kind::f;
    case 'v': return Kind::v;
    default: return std::nullopt;
  }
}

char polarity_char(Polarity p) { return p == Polarity::kOnset ? '+' : '-'; }

std::optional<Polarity> parse_polarity(char c) {
  if (c == '+') return Polarity::kOnset;
  if (c == '-') return Polarity::kOffset;
  return std::nullopt;
}

std::string event_label(const LandmarkEvent& e) { return {kind_char(e.kind), polarity_char(e.polarity)}; }

std::optional<std::pair<Kind, Polarity>> parse_event_label(std::string_view label) {
  if (label.empty()) return std::nullopt;
  auto kind = parse_kind(label[0]);
  if (!kind) return std::nullopt;
  std::string_view rest = label.substr(1);
  if (rest == "+") return std::pair{*kind, Polarity::kOnset};
  if (rest == "-" || rest == "\xE2\x88\x92") return std::pair{*kind, Polarity::kOffset};
  return std::nullopt;
}

bool canonical_less(const LandmarkEvent& a, const LandmarkEvent& b) {
  // Offsets sort before onsets at the same time and kind.
  auto key = [](const LandmarkEvent& e) {
    return std::tuple(e.time_s, kind_index(e.kind), e.polarity == Polarity::kOnset ? 1 : 0);
  };
  return key(a) < key(b);
}

void LandmarkSequence::sort() { std::stable_sort(events.begin(), events.end(), canonical_less); }

bool LandmarkSequence::is_sorted() const { return std::is_sorted(events.begin(), events.end(), canonical_less); }

double quantize_time(double t) { return std::round(t * 1e6) / 1e6; }

}  // namespace landmark
