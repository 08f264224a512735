#include "emm/llr.hpp"

#include "emm/error.hpp"
#include "emm/text.hpp"

#include <cmath>
#include <fstream>

namespace emm {
namespace {

// k * ln(k * n / (row * col)), with the 0 ln 0 = 0 convention.
double cell(double k, double n, double row, double col) {
  if (k <= 0.0) return 0.0;
  return k * std::log(k * n / (row * col));
}

}  // namespace

double g2(double k11, double k12, double k21, double k22) {
  double const r1 = k11 + k12;
  double const r2 = k21 + k22;
  double const c1 = k11 + k21;
  double const c2 = k12 + k22;
  double const n = r1 + r2;
  if (n <= 0.0) return 0.0;
  double const sum = cell(k11, n, r1, c1) + cell(k12, n, r1, c2) + cell(k21, n, r2, c1) + cell(k22, n, r2, c2);
  return std::max(0.0, 2.0 * sum);
}

double keyword_llr(double count, double total, double ref_count, double ref_total) {
  if (count <= 0.0 || total <= 0.0) return 0.0;
  if (ref_total > 0.0 && count / total <= ref_count / ref_total) return 0.0;
  double const score = g2(count, total - count, ref_count, ref_total - ref_count);
  return score < kWeightEpsilon ? 0.0 : score;
}

FrequencyModel FrequencyModel::load(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frequency model " + path.string());
  FrequencyModel model;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto const cols = text::split(line, '\t');
    if (cols.size() != 3) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected token, count, total");
    try {
      auto const count = std::stoull(cols[1]);
      auto const total = std::stoull(cols[2]);
      if (model.total_ != 0 && model.total_ != total) {
        throw Error(path.string() + ":" + std::to_string(lineno) + ": inconsistent total");
      }
      model.total_ = total;
      model.counts_[text::lower(cols[0])] += count;
    } catch (std::logic_error const&) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  return model;
}

void FrequencyModel::add(std::string const& token, std::uint64_t count) { counts_[token] += count; }

std::uint64_t FrequencyModel::count(std::string const& token) const {
  auto const it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

}  // namespace emm
