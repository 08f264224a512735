#pragma once

#include "emm/quotes.hpp"
#include "emm/timeutil.hpp"
#include "emm/xlink.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace emm {

// Engine settings. JSON keys are the member names below except where noted;
// relative paths resolve against the directory of the config file.
struct Config {
  std::filesystem::path data_dir;  // categories/, gazetteer.tsv, geostop/, names/, models/, subjects/
  std::filesystem::path sources;   // sources.tsv; empty = no feeds polled
  std::filesystem::path training;  // default <data_dir>/subjects/train

  double theta = 0.5;      // "theta"
  double tau_link = 0.5;   // "tau_link"
  double tau_name = 0.85;  // "tau_name"
  double rho = 2.0;        // "rho"
  double c_min = 5.0;      // "c_min"
  std::size_t s_min = 10;  // "S_min"
  std::size_t d_min = 5;   // "D_min"
  double rise = 4.0;       // "R"
  std::size_t k = 6;       // "K"
  std::size_t m = 100;     // "M"
  Timestamp window = 4 * kHour;  // "window", seconds
  std::size_t min_articles = 20;  // "W_min"
  Timestamp cadence = 10 * kMinute;  // "cadence", seconds
  bool subjects_enabled = true;  // "subjects"
  bool weekday_normalization = true;  // "weekday_normalization"
  xlink::LinkWeights weights;  // "link_weights": [subject, country, entity, keyword]
  std::vector<quotes::QuoteMarks> quote_marks = quotes::default_quote_marks();  // "quote_marks": [[open, close], ...]

  // Parses and validates; unknown keys are errors.
  static Config parse(std::string_view json, std::filesystem::path const& base_dir);
  static Config load(std::filesystem::path const& path);
  // Defaults with data_dir set.
  static Config defaults(std::filesystem::path const& data_dir);

  // Throws Error naming the first bad setting.
  void validate() const;
  std::string to_json() const;
};

}  // namespace emm
