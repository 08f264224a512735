#include "emm/subject.hpp"

#include "emm/llr.hpp"
#include "emm/sparse.hpp"
#include "emm/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace emm::subject {
namespace {

std::optional<SubjectCode> parse_code(std::string_view s) {
  auto const v = text::parse_number(s);
  if (!v || *v != static_cast<double>(static_cast<SubjectCode>(*v)) || *v < 0) return std::nullopt;
  return static_cast<SubjectCode>(*v);
}

}  // namespace

SubjectThesaurus SubjectThesaurus::load(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  SubjectThesaurus t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto const cols = text::split(line, '\t');
    auto const code = cols.size() == 3 ? parse_code(cols[0]) : std::nullopt;
    if (!code) throw Error(path.filename().string() + ":" + std::to_string(lineno) + ": expected code, lang, label");
    t.add(*code, cols[1], cols[2]);
  }
  return t;
}

void SubjectThesaurus::add(SubjectCode code, std::string const& language, std::string label) {
  labels_[code][language] = std::move(label);
}

std::optional<std::string> SubjectThesaurus::label(SubjectCode code, std::string const& language) const {
  auto const it = labels_.find(code);
  if (it == labels_.end()) return std::nullopt;
  auto const jt = it->second.find(language);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::set<SubjectCode> SubjectThesaurus::codes() const {
  std::set<SubjectCode> out;
  for (auto const& [c, l] : labels_) out.insert(c);
  return out;
}

std::vector<LabeledDoc> load_training(std::filesystem::path const& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw Error("no training directory " + dir.string());
  for (auto const& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledDoc> docs;
  for (auto const& f : files) {
    std::ifstream in(f);
    std::string header;
    std::getline(in, header);
    LabeledDoc d;
    d.name = std::filesystem::relative(f, dir).generic_string();
    d.language = f.parent_path().filename().string();
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      auto const code = parse_code(tok);
      if (!code) throw Error(d.name + ": bad class code '" + tok + "'");
      d.codes.push_back(*code);
    }
    if (d.codes.empty()) throw Error(d.name + ": first line must list class codes");
    std::ostringstream body;
    body << in.rdbuf();
    d.text = body.str();
    docs.push_back(std::move(d));
  }
  return docs;
}

cluster::KeywordVector const* SubjectProfiles::find(std::string const& language, SubjectCode code) const {
  auto const* lang = this->language(language);
  if (!lang) return nullptr;
  auto const it = lang->find(code);
  return it == lang->end() ? nullptr : &it->second;
}

std::map<SubjectCode, cluster::KeywordVector> const* SubjectProfiles::language(std::string const& language) const {
  auto const it = profiles_.find(language);
  return it == profiles_.end() ? nullptr : &it->second;
}

void SubjectProfiles::set(std::string const& language, SubjectCode code, cluster::KeywordVector profile) {
  profiles_[language][code] = std::move(profile);
}

void SubjectProfiles::save(std::ostream& out) const {
  for (auto const& [lang, classes] : profiles_) {
    for (auto const& [code, profile] : classes) {
      if (profile.empty()) out << lang << '\t' << code << "\t\t\n";
      for (auto const& [tok, w] : profile) out << lang << '\t' << code << '\t' << tok << '\t' << text::format_number(w) << '\n';
    }
  }
}

SubjectProfiles SubjectProfiles::load(std::istream& in, std::string const& name) {
  SubjectProfiles p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto const cols = text::split(line, '\t');
    auto const fail = [&] { return Error(name + ":" + std::to_string(lineno) + ": malformed profile row"); };
    if (cols.size() != 4) throw fail();
    auto const code = parse_code(cols[1]);
    if (!code || cols[0].empty()) throw fail();
    auto& profile = p.profiles_[cols[0]][*code];
    if (cols[2].empty() && cols[3].empty()) continue;
    auto const w = text::parse_number(cols[3]);
    if (!w || *w < kWeightEpsilon || cols[2].empty()) throw fail();
    profile[cols[2]] = *w;
  }
  return p;
}

SubjectProfiles train_profiles(std::span<LabeledDoc const> docs, TrainParams const& params,
                               std::set<SubjectCode> const& expected, Diagnostics* diagnostics) {
  struct Counts {
    std::map<std::string, double> tokens;
    double total = 0.0;
  };
  std::map<std::string, Counts> by_lang;
  std::map<std::string, std::map<SubjectCode, Counts>> by_class;
  for (auto const& d : docs) {
    auto const toks = cluster::content_tokens("", d.text);
    std::set<SubjectCode> const codes(d.codes.begin(), d.codes.end());
    auto& lang = by_lang[d.language];
    for (auto const& t : toks) lang.tokens[t] += 1.0;
    lang.total += static_cast<double>(toks.size());
    for (auto c : codes) {
      auto& cls = by_class[d.language][c];
      for (auto const& t : toks) cls.tokens[t] += 1.0;
      cls.total += static_cast<double>(toks.size());
    }
  }

  SubjectProfiles out;
  for (auto const& [lang, classes] : by_class) {
    auto const& all = by_lang.at(lang);
    for (auto const& [code, cls] : classes) {
      double const ref_total = all.total - cls.total;
      std::vector<std::pair<std::string, double>> scored;
      for (auto const& [tok, n] : cls.tokens) {
        double const w = ref_total > 0.0 ? keyword_llr(n, cls.total, all.tokens.at(tok) - n, ref_total) : n;
        if (w >= kWeightEpsilon) scored.emplace_back(tok, w);
      }
      std::sort(scored.begin(), scored.end(), [](auto const& a, auto const& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      if (scored.size() > params.profile_size) scored.resize(params.profile_size);
      out.set(lang, code, cluster::KeywordVector(scored.begin(), scored.end()));
    }
    for (auto code : expected) {
      if (classes.count(code)) continue;
      out.set(lang, code, {});
      if (diagnostics) {
        diagnostics->push_back({"subject " + std::to_string(code), "no training documents in '" + lang + "'"});
      }
    }
  }
  return out;
}

std::vector<std::pair<SubjectCode, double>> ranked(SubjectVector const& v) {
  std::vector<std::pair<SubjectCode, double>> out(v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(), [](auto const& a, auto const& b) { return a.second > b.second; });
  return out;
}

SubjectVector classify_subjects(cluster::KeywordVector const& text_vector, std::string const& language,
                                SubjectProfiles const& profiles, std::size_t k, Diagnostics* diagnostics) {
  auto const* classes = profiles.language(language);
  if (!classes || classes->empty()) {
    if (diagnostics) diagnostics->push_back({"subject", "no trained profiles for '" + language + "'"});
    return {};
  }
  SubjectVector scores;
  for (auto const& [code, profile] : *classes) {
    double const s = cosine(text_vector, profile);
    if (s >= kWeightEpsilon) scores[code] = s;
  }
  auto top = ranked(scores);
  if (top.size() > k) top.resize(k);
  SubjectVector out;
  if (top.empty()) return out;
  double const best = top.front().second;
  for (auto const& [code, s] : top) out[code] = s / best;
  return out;
}

SubjectVector classify_subjects(std::string_view text, std::string const& language, SubjectProfiles const& profiles,
                                std::size_t k, Diagnostics* diagnostics) {
  auto const toks = cluster::content_tokens("", text);
  return classify_subjects(cluster::term_frequency(toks), language, profiles, k, diagnostics);
}

}  // namespace emm::subject
