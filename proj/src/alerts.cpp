#include "emm/alerts.hpp"

#include <algorithm>

namespace emm::alerts {
namespace {

Timestamp hour_start(Timestamp t) {
  Timestamp h = t - t % kHour;
  if (t % kHour < 0) h -= kHour;
  return h;
}

}  // namespace

WeekdayFactors estimate_weekday_factors(std::map<Day, int> const& daily, Day from, Day to, double floor) {
  WeekdayFactors f;
  f.fill(1.0);
  if (to <= from) return f;
  std::array<double, 7> sum{}, days{};
  double total = 0.0;
  for (Day d = from; d < to; ++d) {
    auto const it = daily.find(d);
    double const n = it == daily.end() ? 0.0 : it->second;
    sum[weekday(d)] += n;
    days[weekday(d)] += 1.0;
    total += n;
  }
  if (total <= 0.0) return f;
  double const overall = total / static_cast<double>(to - from);
  for (int w = 0; w < 7; ++w) {
    if (days[w] > 0.0) f[w] = std::max(floor, sum[w] / days[w] / overall);
  }
  double mean = 0.0;
  for (double x : f) mean += x;
  mean /= 7.0;
  for (double& x : f) x /= mean;
  return f;
}

double weekday_normalize(double count, int weekday, WeekdayFactors const& factors) { return count / factors.at(weekday); }

int level_bucket(double level) {
  if (level >= 8.0) return 3;
  if (level >= 4.0) return 2;
  if (level >= 2.0) return 1;
  return 0;
}

bool AlertStore::add(std::string const& article_id, std::set<std::string> const& countries,
                     std::set<std::string> const& categories, Timestamp at) {
  if (!seen_.emplace(article_id, at).second) return false;
  Day const d = day_of(at);
  if (!first_day_ || d < *first_day_) first_day_ = d;
  for (auto const& c : countries) {
    for (auto const& cat : categories) ++hourly_[{c, cat}][hour_start(at)];
  }
  return true;
}

std::map<Day, int> AlertStore::daily_counts(AlertKey const& key) const {
  std::map<Day, int> out;
  auto const it = hourly_.find(key);
  if (it == hourly_.end()) return out;
  for (auto const& [h, n] : it->second) out[day_of(h)] += n;
  return out;
}

std::optional<Alert> AlertStore::check(AlertKey const& key, Timestamp now, AlertParams const& params) const {
  if (!first_day_) return std::nullopt;
  Day const today = day_of(now - 1);
  if (today - *first_day_ < params.warmup_days) return std::nullopt;

  double count = 0.0;
  if (auto const it = hourly_.find(key); it != hourly_.end()) {
    for (auto h = it->second.lower_bound(now - kDay); h != it->second.end() && h->first < now; ++h) count += h->second;
  }
  auto const daily = daily_counts(key);
  Day const base_from = std::max(*first_day_, today - params.history_days);
  double mean = 0.0;
  if (today > base_from) {
    for (Day d = base_from; d < today; ++d) {
      auto const it = daily.find(d);
      if (it != daily.end()) mean += it->second;
    }
    mean /= static_cast<double>(today - base_from);
  }
  double adjusted = count;
  if (params.weekday_normalization) {
    auto const factors =
        estimate_weekday_factors(daily, std::max(*first_day_, today - params.factor_days), today, params.factor_floor);
    adjusted = weekday_normalize(count, weekday(today), factors);
  }
  if (adjusted < std::max(params.c_min, params.rho * mean)) return std::nullopt;
  Alert a;
  a.at = now;
  a.key = key;
  a.count = count;
  a.adjusted = adjusted;
  a.mean = mean;
  a.level = adjusted / std::max(mean, 1.0);
  a.bucket = level_bucket(a.level);
  return a;
}

std::vector<Alert> AlertStore::evaluate(Timestamp now, AlertParams const& params) {
  std::vector<Alert> out;
  Day const today = day_of(now - 1);
  for (auto const& [key, hours] : hourly_) {
    auto a = check(key, now, params);
    if (!a) continue;
    auto const it = raised_.find(key);
    if (it != raised_.end() && it->second.first == today && it->second.second >= a->bucket) continue;
    raised_[key] = {today, a->bucket};
    out.push_back(std::move(*a));
  }
  return out;
}

void AlertStore::prune(Timestamp now, AlertParams const& params) {
  Timestamp const cutoff = day_start(day_of(now) - params.factor_days - 1);
  for (auto it = hourly_.begin(); it != hourly_.end();) {
    auto& hours = it->second;
    hours.erase(hours.begin(), hours.lower_bound(cutoff));
    it = hours.empty() ? hourly_.erase(it) : std::next(it);
  }
  std::erase_if(seen_, [&](auto const& kv) { return kv.second < cutoff; });
}

void AlertStore::restore(std::map<AlertKey, std::map<Timestamp, int>> hourly, std::map<std::string, Timestamp> seen,
                         std::map<AlertKey, std::pair<Day, int>> raised, std::optional<Day> first_day) {
  hourly_ = std::move(hourly);
  seen_ = std::move(seen);
  raised_ = std::move(raised);
  first_day_ = first_day;
}

}  // namespace emm::alerts
