#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "incivil/util.hpp"

using namespace incivil;

TEST(Iso8601, ParsesZuluAndOffsets) {
  auto a = parse_iso8601("2017-08-01T14:30:00Z");
  EXPECT_EQ(format_iso8601(a), "2017-08-01T14:30:00Z");
  EXPECT_EQ(parse_iso8601("2017-08-01T16:30:00+02:00"), a);
  EXPECT_EQ(hour_of_day(a), 14);
  EXPECT_EQ(hour_of_day(a, -5), 9);
}

TEST(Iso8601, RejectsGarbage) {
  EXPECT_THROW(parse_iso8601("not-a-date"), Error);
  EXPECT_THROW(parse_iso8601("2017-13-01T00:00:00Z"), Error);
}

TEST(Utf8, RoundTrip) {
  const std::string s = "a\xE2\x98\x83z";
  auto cps = utf8::decode(s);
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1], U'☃');
  EXPECT_EQ(utf8::encode(cps), s);
}

TEST(Strings, StripPunctAndSplit) {
  EXPECT_EQ(strip_punct("!!idiot,"), "idiot");
  EXPECT_EQ(strip_punct("..."), "");
  EXPECT_EQ(split_whitespace("  a \t b\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
}

TEST(Hexfloat, RoundTripIsExact) {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, -12345.678, std::numeric_limits<double>::denorm_min()}) {
    double back = parse_hexfloat(hexfloat(v));
    EXPECT_EQ(std::signbit(back), std::signbit(v));
    EXPECT_EQ(back, v);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Fnv, KnownVector) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(ParallelFor, VisitsEveryChunkOnce) {
  std::vector<int> hits(37, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
