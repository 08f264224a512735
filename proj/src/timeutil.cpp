#include "emm/timeutil.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace emm {
namespace {

// Howard Hinnant's civil calendar conversions.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  std::int64_t const era = (y >= 0 ? y : y - 399) / 400;
  auto const yoe = static_cast<unsigned>(y - era * 400);
  unsigned const doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  unsigned const doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t y;
  unsigned m;
  unsigned d;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  std::int64_t const era = (z >= 0 ? z : z - 146096) / 146097;
  auto const doe = static_cast<unsigned>(z - era * 146097);
  unsigned const yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  std::int64_t const y = static_cast<std::int64_t>(yoe) + era * 400;
  unsigned const doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned const mp = (5 * doy + 2) / 153;
  unsigned const d = doy - (153 * mp + 2) / 5 + 1;
  unsigned const m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

constexpr std::array<const char*, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<const char*, 7> kWeekdays = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::optional<int> number(std::size_t min_digits, std::size_t max_digits) {
    std::size_t const start = pos_;
    while (pos_ < s_.size() && pos_ - start < max_digits && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ - start < min_digits) return std::nullopt;
    int v = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, v);
    return v;
  }
  std::string_view word() {
    std::size_t const start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

bool valid_fields(int year, int month, int day, int hour, int minute, int second) {
  return year >= 1900 && month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour >= 0 && hour <= 23 &&
         minute >= 0 && minute <= 59 && second >= 0 && second <= 60;
}

}  // namespace

Day day_of(Timestamp t) { return t >= 0 ? t / kDay : -((-t + kDay - 1) / kDay); }
Timestamp day_start(Day d) { return d * kDay; }
int weekday(Day d) {
  // 1970-01-01 was a Thursday (index 3).
  auto const w = (d + 3) % 7;
  return static_cast<int>(w < 0 ? w + 7 : w);
}

Timestamp make_utc(int year, int month, int day, int hour, int minute, int second) {
  return days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) * kDay + hour * kHour +
         minute * kMinute + second;
}

std::optional<Timestamp> parse_rfc822(std::string_view s) {
  Scanner sc(s);
  sc.skip_space();
  if (std::isalpha(static_cast<unsigned char>(sc.peek()))) {
    sc.word();  // day-of-week is redundant
    sc.skip_space();
    if (!sc.eat(',')) return std::nullopt;
  }
  sc.skip_space();
  auto const day = sc.number(1, 2);
  sc.skip_space();
  auto const mon = sc.word();
  sc.skip_space();
  auto year = sc.number(2, 4);
  sc.skip_space();
  auto const hour = sc.number(1, 2);
  if (!day || !year || !hour || !sc.eat(':')) return std::nullopt;
  auto const minute = sc.number(2, 2);
  if (!minute) return std::nullopt;
  int second = 0;
  if (sc.eat(':')) {
    auto const sec = sc.number(2, 2);
    if (!sec) return std::nullopt;
    second = *sec;
  }
  int month = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (iequals(mon, kMonths[i])) month = static_cast<int>(i) + 1;
  }
  if (month == 0) return std::nullopt;
  if (*year < 100) *year += *year < 50 ? 2000 : 1900;
  if (!valid_fields(*year, month, *day, *hour, *minute, second)) return std::nullopt;

  sc.skip_space();
  int offset = 0;
  if (sc.peek() == '+' || sc.peek() == '-') {
    bool const neg = sc.peek() == '-';
    sc.eat(sc.peek());
    auto const hhmm = sc.number(4, 4);
    if (!hhmm) return std::nullopt;
    offset = (*hhmm / 100) * 3600 + (*hhmm % 100) * 60;
    if (neg) offset = -offset;
  } else if (!sc.done()) {
    auto const zone = sc.word();
    static constexpr std::pair<const char*, int> kZones[] = {
        {"GMT", 0}, {"UT", 0}, {"UTC", 0}, {"Z", 0}, {"EST", -5}, {"EDT", -4},
        {"CST", -6}, {"CDT", -5}, {"MST", -7}, {"MDT", -6}, {"PST", -8}, {"PDT", -7}};
    bool known = false;
    for (auto const& [name, hours] : kZones) {
      if (iequals(zone, name)) {
        offset = hours * 3600;
        known = true;
      }
    }
    if (!known) return std::nullopt;
  }
  return make_utc(*year, month, *day, *hour, *minute, second) - offset;
}

std::string format_rfc822(Timestamp t) {
  Day const d = day_of(t);
  auto const c = civil_from_days(d);
  Timestamp const secs = t - day_start(d);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s, %02u %s %04lld %02lld:%02lld:%02lld GMT", kWeekdays[static_cast<std::size_t>(weekday(d))],
                c.d, kMonths[c.m - 1], static_cast<long long>(c.y), static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  Scanner sc(s);
  sc.skip_space();
  auto const year = sc.number(4, 4);
  if (!year || !sc.eat('-')) return std::nullopt;
  auto const month = sc.number(2, 2);
  if (!month || !sc.eat('-')) return std::nullopt;
  auto const day = sc.number(2, 2);
  if (!day) return std::nullopt;
  int hour = 0, minute = 0, second = 0;
  if (sc.eat('T') || sc.eat(' ')) {
    auto const h = sc.number(2, 2);
    if (!h || !sc.eat(':')) return std::nullopt;
    auto const m = sc.number(2, 2);
    if (!m) return std::nullopt;
    hour = *h;
    minute = *m;
    if (sc.eat(':')) {
      auto const sec = sc.number(2, 2);
      if (!sec) return std::nullopt;
      second = *sec;
      if (sc.eat('.')) sc.number(1, 9);
    }
  }
  int offset = 0;
  if (sc.eat('Z') || sc.eat('z')) {
  } else if (sc.peek() == '+' || sc.peek() == '-') {
    bool const neg = sc.peek() == '-';
    sc.eat(sc.peek());
    auto const oh = sc.number(2, 2);
    if (!oh) return std::nullopt;
    sc.eat(':');
    auto const om = sc.number(2, 2);
    offset = *oh * 3600 + om.value_or(0) * 60;
    if (neg) offset = -offset;
  }
  sc.skip_space();
  if (!sc.done()) return std::nullopt;
  if (!valid_fields(*year, *month, *day, hour, minute, second)) return std::nullopt;
  return make_utc(*year, *month, *day, hour, minute, second) - offset;
}

std::string format_iso8601(Timestamp t) {
  Day const d = day_of(t);
  auto const c = civil_from_days(d);
  Timestamp const secs = t - day_start(d);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(c.y), c.m, c.d,
                static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

std::string format_date(Day d) {
  auto const c = civil_from_days(d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(c.y), c.m, c.d);
  return buf;
}

std::optional<Day> parse_date(std::string_view s) {
  if (s.size() != 10) return std::nullopt;
  auto const t = parse_iso8601(s);
  if (!t) return std::nullopt;
  return day_of(*t);
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  Timestamp v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  if (auto const t = parse_iso8601(s)) return t;
  return parse_rfc822(s);
}

}  // namespace emm
