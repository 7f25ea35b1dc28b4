#include <random>
#include <sstream>

#include "doctest.h"
#include "landmark/error.hpp"
#include "landmark/landmark_io.hpp"
#include "oracles.hpp"

using namespace landmark;

namespace {

LandmarkSequence random_sequence(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> t(0.0, 30.0);
  std::uniform_real_distribution<double> sal(-5.0, 80.0);
  std::uniform_int_distribution<int> k(0, 4), p(0, 1);
  LandmarkSequence seq{"utt_" + std::to_string(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    seq.events.push_back({kAllKinds[static_cast<std::size_t>(k(rng))], p(rng) ? Polarity::kOffset : Polarity::kOnset,
                          quantize_time(t(rng)), sal(rng)});
  }
  seq.sort();
  return seq;
}

template <class Write, class Read>
LandmarkSequence round_trip(const LandmarkSequence& seq, Write write, Read read) {
  std::stringstream ss;
  write(ss, seq);
  return read(ss);
}

}  // namespace

TEST_CASE("labels and formats") {
  CHECK(event_label({Kind::s, Polarity::kOffset, 0, 0}) == "s-");
  CHECK(parse_event_label("g+") == std::pair{Kind::g, Polarity::kOnset});
  CHECK(parse_event_label("v−") == std::pair{Kind::v, Polarity::kOffset});
  CHECK_FALSE(parse_event_label("x+"));
  CHECK_FALSE(parse_event_label("g"));
  CHECK_FALSE(parse_event_label("g+-"));
  CHECK(format_from_path("a/b.TextGrid") == LandmarkFormat::kTextGrid);
  CHECK(format_from_path("x.json") == LandmarkFormat::kJson);
  CHECK_FALSE(format_from_path("x.txt"));
  CHECK(parse_format("csv") == LandmarkFormat::kCsv);
  CHECK(quantize_time(0.1234564) == 0.123456);
  CHECK(quantize_time(0.1234566) == 0.123457);
}

TEST_CASE("csv, json and TextGrid round trips are exact") {
  std::mt19937_64 rng(17);
  for (std::size_t n : {0u, 1u, 2u, 7u, 40u}) {
    const auto seq = random_sequence(rng, n);
    const auto csv = round_trip(seq, write_landmarks_csv, [&](std::istream& in) { return read_landmarks_csv(in, seq.utterance_id); });
    CHECK(csv == seq);
    const auto json = round_trip(seq, write_landmarks_json, [&](std::istream& in) { return read_landmarks_json(in, seq.utterance_id); });
    CHECK(json == seq);
    const auto tg = round_trip(
        seq, [](std::ostream& out, const LandmarkSequence& s) { write_landmarks_textgrid(out, s); },
        [&](std::istream& in) { return read_landmarks_textgrid(in, seq.utterance_id); });
    CHECK(tg == seq);
  }
}

TEST_CASE("csv layout") {
  LandmarkSequence seq{"a1", {{Kind::g, Polarity::kOnset, 0.25, 12.5}, {Kind::f, Polarity::kOffset, 1.0, 0.0}}};
  std::stringstream ss;
  write_landmarks_csv(ss, seq);
  CHECK(ss.str() == "utt_id,time_s,kind,polarity,salience_db\na1,0.250000,g,+,12.5\na1,1.000000,f,-,0\n");
}

TEST_CASE("readers accept the unicode minus and reject bad rows") {
  std::istringstream csv("utt_id,time_s,kind,polarity,salience_db\nu,0.5,g,−,1\n");
  const auto seq = read_landmarks_csv(csv);
  REQUIRE(seq.events.size() == 1);
  CHECK(seq.events[0].polarity == Polarity::kOffset);
  CHECK(seq.utterance_id == "u");

  std::istringstream bad_kind("u,0.5,x,+,1\n");
  CHECK_THROWS_AS(read_landmarks_csv(bad_kind), FormatError);
  std::istringstream bad_cols("u,0.5,g,+\n");
  CHECK_THROWS_WITH_AS(read_landmarks_csv(bad_cols), doctest::Contains("line 1"), FormatError);
  std::istringstream bad_num("u,abc,g,+,0\n");
  CHECK_THROWS_AS(read_landmarks_csv(bad_num), FormatError);
  std::istringstream negative("u,-1,g,+,0\n");
  CHECK_THROWS_AS(read_landmarks_csv(negative), FormatError);
  std::istringstream not_array("{\"a\": 1}");
  CHECK_THROWS_AS(read_landmarks_json(not_array), FormatError);
  std::istringstream broken("[{");
  CHECK_THROWS_AS(read_landmarks_json(broken), FormatError);
  std::istringstream empty_csv("");
  CHECK(read_landmarks_csv(empty_csv, "e") == LandmarkSequence{"e", {}});
}

TEST_CASE("TextGrid from another tool") {
  // A single unnamed-purpose point tier with no salience tier.
  const std::string tg =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0\nxmax = 1\ntiers? <exists>\nsize = 1\nitem []:\n"
      "    item [1]:\n        class = \"TextTier\"\n        name = \"lm\"\n        xmin = 0\n        xmax = 1\n"
      "        points: size = 2\n        points [1]:\n            number = 0.1\n            mark = \"g+\"\n"
      "        points [2]:\n            number = 0.4\n            mark = \"g−\"\n";
  std::istringstream in(tg);
  const auto seq = read_landmarks_textgrid(in, "x");
  REQUIRE(seq.events.size() == 2);
  CHECK(seq.events[1].polarity == Polarity::kOffset);
  CHECK(seq.events[1].time_s == 0.4);
  CHECK(seq.events[1].salience_db == 0.0);

  std::istringstream bad(tg.substr(0, tg.rfind("g−")) + "q+\"\n");
  CHECK_THROWS_WITH_AS(read_landmarks_textgrid(bad, "x"), doctest::Contains("line"), FormatError);
  std::istringstream none("File type = \"ooTextFile\"\n");
  CHECK_THROWS_AS(read_landmarks_textgrid(none), FormatError);
}

TEST_CASE("file dispatch") {
  oracle::TempDir dir("lmio");
  std::mt19937_64 rng(2);
  const auto seq = random_sequence(rng, 12);
  for (auto fmt : {LandmarkFormat::kCsv, LandmarkFormat::kJson, LandmarkFormat::kTextGrid}) {
    const auto path = dir / (seq.utterance_id + std::string(format_extension(fmt)));
    write_landmarks(path, seq, fmt, 31.0);
    CHECK(read_landmarks(path) == seq);
  }
  CHECK_THROWS_AS(read_landmarks(dir / "missing.csv"), IoError);
  oracle::write_file(dir / "x.txt", "");
  CHECK_THROWS_AS(read_landmarks(dir / "x.txt"), FormatError);
  oracle::write_file(dir / "bad.csv", "u,1,z,+,0\n");
  CHECK_THROWS_WITH_AS(read_landmarks(dir / "bad.csv"), doctest::Contains("bad.csv"), FormatError);
}
