#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace emm {

// Seconds since the Unix epoch, UTC. Every stage takes time from an injected
// logical clock; nothing reads the wall clock.
using Timestamp = std::int64_t;
using Day = std::int64_t;  // days since 1970-01-01

constexpr Timestamp kMinute = 60;
constexpr Timestamp kHour = 3600;
constexpr Timestamp kDay = 86400;

Day day_of(Timestamp t);
Timestamp day_start(Day d);
int weekday(Day d);  // 0 = Monday ... 6 = Sunday

Timestamp make_utc(int year, int month, int day, int hour = 0, int minute = 0, int second = 0);

// RFC 822 / 1123 dates as used by RSS ("Tue, 10 Jun 2003 04:00:00 GMT").
std::optional<Timestamp> parse_rfc822(std::string_view s);
std::string format_rfc822(Timestamp t);

// ISO 8601 as used by Atom ("2003-12-13T18:30:02Z", offsets allowed).
std::optional<Timestamp> parse_iso8601(std::string_view s);
std::string format_iso8601(Timestamp t);
std::string format_date(Day d);  // YYYY-MM-DD
std::optional<Day> parse_date(std::string_view s);

// Accepts RFC 822, ISO 8601, or a plain integer of epoch seconds.
std::optional<Timestamp> parse_timestamp(std::string_view s);

}  // namespace emm
