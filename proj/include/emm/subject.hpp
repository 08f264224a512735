#pragma once

#include "emm/cluster.hpp"
#include "emm/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace emm::subject {

using SubjectCode = int;

// Class codes with per-language labels (`classes.tsv`: code, lang, label).
class SubjectThesaurus {
 public:
  static SubjectThesaurus load(std::filesystem::path const& path);
  void add(SubjectCode code, std::string const& language, std::string label);
  std::optional<std::string> label(SubjectCode code, std::string const& language) const;
  std::set<SubjectCode> codes() const;

 private:
  std::map<SubjectCode, std::map<std::string, std::string>> labels_;
};

struct LabeledDoc {
  std::string name;
  std::string language;
  std::vector<SubjectCode> codes;
  std::string text;
};

// `<dir>/<lang>/*.txt`; the first line of each file lists its class codes.
std::vector<LabeledDoc> load_training(std::filesystem::path const& dir);

// Per (language, class) term profiles.
class SubjectProfiles {
 public:
  cluster::KeywordVector const* find(std::string const& language, SubjectCode code) const;
  std::map<SubjectCode, cluster::KeywordVector> const* language(std::string const& language) const;
  void set(std::string const& language, SubjectCode code, cluster::KeywordVector profile);
  bool empty() const { return profiles_.empty(); }

  // TSV rows: lang, code, token, weight (shortest round-trip decimal).
  void save(std::ostream& out) const;
  static SubjectProfiles load(std::istream& in, std::string const& name = "profiles");

  friend bool operator==(SubjectProfiles const&, SubjectProfiles const&) = default;

 private:
  std::map<std::string, std::map<SubjectCode, cluster::KeywordVector>> profiles_;
};

struct TrainParams {
  std::size_t profile_size = 100;  // M
};

// Profile of a class = its top-M tokens by keyword LLR of the class documents
// against the other documents of the language. A class that is alone in its
// language falls back to raw counts. Classes in `expected` without documents
// in some trained language get an empty profile and a diagnostic.
SubjectProfiles train_profiles(std::span<LabeledDoc const> docs, TrainParams const& params = {},
                               std::set<SubjectCode> const& expected = {}, Diagnostics* diagnostics = nullptr);

// Class code -> weight in (0, 1]; the best class has weight 1.
using SubjectVector = std::map<SubjectCode, double>;

// Weight descending, then code ascending.
std::vector<std::pair<SubjectCode, double>> ranked(SubjectVector const& v);

// Cosine of the text vector against every profile of the language; the top K
// non-zero classes, scaled so the maximum is 1.
SubjectVector classify_subjects(cluster::KeywordVector const& text_vector, std::string const& language,
                                SubjectProfiles const& profiles, std::size_t k = 6, Diagnostics* diagnostics = nullptr);
SubjectVector classify_subjects(std::string_view text, std::string const& language, SubjectProfiles const& profiles,
                                std::size_t k = 6, Diagnostics* diagnostics = nullptr);

}  // namespace emm::subject
