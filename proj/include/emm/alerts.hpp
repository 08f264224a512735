#pragma once

#include "emm/timeutil.hpp"

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace emm::alerts {

struct AlertKey {
  std::string country;   // ISO 3166-1 alpha-2
  std::string category;  // category id

  friend auto operator<=>(AlertKey const&, AlertKey const&) = default;
};

struct AlertParams {
  double rho = 2.0;     // ratio threshold
  double c_min = 5.0;   // absolute floor
  int history_days = 14;
  int warmup_days = 7;
  int factor_days = 56;  // weekday factor horizon
  double factor_floor = 0.25;
  bool weekday_normalization = true;
};

using WeekdayFactors = std::array<double, 7>;  // index = weekday(), Monday first

// Per-weekday mean over overall mean for the days [from, to) (days without
// entries count as zero), floored and rescaled to average 1. All ones when
// the range is empty or has no articles.
WeekdayFactors estimate_weekday_factors(std::map<Day, int> const& daily, Day from, Day to, double floor = 0.25);

double weekday_normalize(double count, int weekday, WeekdayFactors const& factors);

struct Alert {
  Timestamp at = 0;
  AlertKey key;
  double count = 0.0;     // articles in the last 24 hours
  double adjusted = 0.0;  // after weekday normalisation
  double mean = 0.0;      // daily mean over the baseline days
  double level = 0.0;     // adjusted / max(mean, 1)
  int bucket = 0;         // 0..3 for level below 2, from 2, from 4, from 8

  friend bool operator==(Alert const&, Alert const&) = default;
};

int level_bucket(double level);

// Hourly article counts per (country, category), fed by every language.
class AlertStore {
 public:
  // Counts the article once for every (country, category) pair; an article
  // id seen before is ignored. Returns false in that case.
  bool add(std::string const& article_id, std::set<std::string> const& countries,
           std::set<std::string> const& categories, Timestamp at);

  std::map<Day, int> daily_counts(AlertKey const& key) const;
  std::optional<Day> first_day() const { return first_day_; }

  // Decision for the 24 hours before `now`. The assessed day is the one
  // holding now - 1; the baseline is the preceding history_days days (the
  // assessed day excluded). No alert before warmup_days of history.
  std::optional<Alert> check(AlertKey const& key, Timestamp now, AlertParams const& params = {}) const;

  // check() over every key, skipping alerts already raised for the same key
  // and day unless the bucket went up. Records what it returns.
  std::vector<Alert> evaluate(Timestamp now, AlertParams const& params = {});

  // Drops counts and seen ids older than the weekday factor horizon.
  void prune(Timestamp now, AlertParams const& params = {});

  // Persistence access.
  std::map<AlertKey, std::map<Timestamp, int>> const& hourly() const { return hourly_; }
  std::map<std::string, Timestamp> const& seen() const { return seen_; }
  std::map<AlertKey, std::pair<Day, int>> const& raised() const { return raised_; }
  void restore(std::map<AlertKey, std::map<Timestamp, int>> hourly, std::map<std::string, Timestamp> seen,
               std::map<AlertKey, std::pair<Day, int>> raised, std::optional<Day> first_day);

  friend bool operator==(AlertStore const&, AlertStore const&) = default;

 private:
  std::map<AlertKey, std::map<Timestamp, int>> hourly_;  // hour start -> count
  std::map<std::string, Timestamp> seen_;
  std::map<AlertKey, std::pair<Day, int>> raised_;  // last (day, bucket) raised
  std::optional<Day> first_day_;
};

}  // namespace emm::alerts
