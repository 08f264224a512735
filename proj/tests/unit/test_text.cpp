#include <doctest.h>

#include "emm/text.hpp"
#include "emm/timeutil.hpp"

using namespace emm;

TEST_CASE("nfc composes decomposed sequences") {
  CHECK(text::nfc("Caf\x65\xCC\x81") == "Caf\xC3\xA9");
  CHECK(text::nfc("plain") == "plain");
}

TEST_CASE("utf8 round trip and validation") {
  std::string const s = "Wałęsa Али Ελλάδα";
  CHECK(text::to_utf8(text::to_u32(s)) == s);
  CHECK(text::is_valid_utf8(s));
  CHECK_FALSE(text::is_valid_utf8("\xC3"));
  CHECK_FALSE(text::is_valid_utf8("\xC0\xAF"));  // overlong
  CHECK(text::length("Wałęsa") == 6);
}

TEST_CASE("case mapping covers Latin, Cyrillic and Greek") {
  CHECK(text::lower("AIDS") == "aids");
  CHECK(text::lower("ХАМЕНЕИ") == "хаменеи");
  CHECK(text::lower("ΑΘΗΝΑ") == "αθηνα");
  CHECK(text::is_capitalized("Хаменеи"));
  CHECK_FALSE(text::is_capitalized("хаменеи"));
}

TEST_CASE("strip_diacritics") {
  CHECK(text::strip_diacritics("Wałęsa") == "Walesa");
  CHECK(text::strip_diacritics("Łódź") == "Lodz");
  CHECK(text::strip_diacritics("Straße") == "Strasse");
}

TEST_CASE("tokenize splits on letter/non-letter transitions") {
  auto const toks = text::tokenize("le pain, est bon! 58-year-old");
  REQUIRE(toks.size() == 7);
  CHECK(toks[1].text == "pain");
  CHECK(toks[4].text == "58");
  CHECK(toks[6].text == "old");
  CHECK(toks[1].begin == 3);
  CHECK(toks[1].end == 7);

  auto const wild = text::tokenize("tuber_ul% x", "_%");
  REQUIRE(wild.size() == 2);
  CHECK(wild[0].text == "tuber_ul%");
}

TEST_CASE("clean_whitespace drops controls and collapses runs") {
  CHECK(text::clean_whitespace("  a\t\tb\x01 c \n") == "a b c");
}

TEST_CASE("rfc822 and iso8601 dates") {
  auto const t = parse_rfc822("Mon, 02 Mar 2009 08:00:00 GMT");
  REQUIRE(t);
  CHECK(*t == make_utc(2009, 3, 2, 8));
  CHECK(parse_rfc822("Mon, 02 Mar 2009 09:30:00 +0100") == make_utc(2009, 3, 2, 8, 30));
  CHECK(format_rfc822(*t) == "Mon, 02 Mar 2009 08:00:00 GMT");
  CHECK(parse_rfc822(format_rfc822(1234567890)) == 1234567890);
  CHECK(parse_iso8601("2009-03-02T12:00:00Z") == make_utc(2009, 3, 2, 12));
  CHECK(parse_iso8601("2009-03-02T14:00:00+02:00") == make_utc(2009, 3, 2, 12));
  CHECK_FALSE(parse_rfc822("yesterday"));
  CHECK(format_date(day_of(make_utc(2009, 3, 2, 23, 59))) == "2009-03-02");
  CHECK(weekday(day_of(make_utc(2009, 3, 2))) == 0);  // a Monday
  CHECK(weekday(day_of(make_utc(2009, 3, 8))) == 6);
  CHECK(parse_timestamp("1234567890") == 1234567890);
}
