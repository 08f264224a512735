#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

namespace emm {

// Dunning's log-likelihood ratio statistic G^2 for the 2x2 table
//   k11 k12
//   k21 k22
// Empty cells contribute zero. Result is >= 0 (tiny negatives from rounding
// are clamped).
double g2(double k11, double k12, double k21, double k22);

// One-sided keyword score of a token seen `count` times in a sample of
// `total` tokens against a reference with `ref_count` of `ref_total`. Tokens
// not over-represented in the sample score 0.
double keyword_llr(double count, double total, double ref_count, double ref_total);

// Weights below this are treated as zero and never stored.
constexpr double kWeightEpsilon = 1e-9;

// Token -> corpus frequency table for one language.
class FrequencyModel {
 public:
  FrequencyModel() = default;

  // TSV rows: token, count, total. `total` must agree across rows.
  static FrequencyModel load(std::filesystem::path const& path);

  void add(std::string const& token, std::uint64_t count);
  void set_total(std::uint64_t total) { total_ = total; }

  std::uint64_t count(std::string const& token) const;
  std::uint64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace emm
