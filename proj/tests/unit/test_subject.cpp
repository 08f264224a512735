#include <doctest.h>

#include "emm/subject.hpp"

#include <sstream>

using namespace emm;
using namespace emm::subject;

namespace {

std::filesystem::path subjects_dir() { return std::filesystem::path(EMM_DATA_DIR) / "subjects"; }

SubjectProfiles const& shipped() {
  static SubjectProfiles const p = [] {
    auto const docs = load_training(subjects_dir() / "train");
    return train_profiles(docs);
  }();
  return p;
}

LabeledDoc doc(std::string lang, std::vector<SubjectCode> codes, std::string text) {
  return {"", std::move(lang), std::move(codes), std::move(text)};
}

}  // namespace

TEST_CASE("training") {
  std::vector<LabeledDoc> const one{doc("en", {7}, "wheat farm subsidy")};
  auto const p = train_profiles(one);
  auto const* prof = p.find("en", 7);
  REQUIRE(prof);
  CHECK(prof->size() == 3);
  for (auto const& [t, w] : *prof) CHECK(w > 0.0);

  // A token equally frequent in and out of class gets no weight.
  std::vector<LabeledDoc> const two{doc("en", {1}, "common alpha"), doc("en", {2}, "common beta")};
  auto const q = train_profiles(two);
  CHECK(q.find("en", 1)->count("common") == 0);
  CHECK(q.find("en", 1)->count("alpha") == 1);

  // Multi-label documents feed every listed class.
  std::vector<LabeledDoc> const multi{doc("en", {1, 2}, "grain export"), doc("en", {3}, "goal match")};
  auto const m = train_profiles(multi);
  CHECK(m.find("en", 1)->count("grain") == 1);
  CHECK(m.find("en", 2)->count("grain") == 1);
  CHECK(m.find("en", 3)->count("grain") == 0);

  Diagnostics d;
  auto const e = train_profiles(one, {}, {7, 9}, &d);
  REQUIRE(e.find("en", 9));
  CHECK(e.find("en", 9)->empty());
  CHECK(d.size() == 1);

  TrainParams small;
  small.profile_size = 2;
  CHECK(train_profiles(one, small).find("en", 7)->size() == 2);
}

TEST_CASE("classification") {
  std::vector<LabeledDoc> const docs{doc("en", {1}, "wheat farm subsidy harvest"), doc("en", {2}, "goal match team final")};
  auto const p = train_profiles(docs);
  auto const v = classify_subjects("wheat farm subsidy harvest", "en", p);
  REQUIRE(!v.empty());
  CHECK(ranked(v).front().first == 1);
  CHECK(v.at(1) == 1.0);

  CHECK(classify_subjects("completely unrelated words", "en", p).empty());
  Diagnostics d;
  CHECK(classify_subjects("wheat", "xx", p, 6, &d).empty());
  CHECK(d.size() == 1);

  // Duplicating the text leaves the result unchanged.
  auto const text = std::string("wheat harvest and a final goal");
  CHECK(classify_subjects(text, "en", p) == classify_subjects(text + " " + text, "en", p));
}

TEST_CASE("shipped corpus: parallel texts agree") {
  CHECK(SubjectThesaurus::load(subjects_dir() / "classes.tsv").codes().size() == 10);
  std::vector<std::pair<std::string, std::string>> const pairs{
      {"An earthquake destroyed buildings and rescue teams search for survivors.",
       "Un séisme a détruit des bâtiments et les secours recherchent des survivants."},
      {"The central bank raised interest rates and shares fell.",
       "La banque centrale a relevé les taux d'intérêt et les actions ont chuté."},
      {"Doctors treat patients in hospitals during the epidemic.",
       "Les médecins soignent les patients dans les hôpitaux pendant l'épidémie."}};
  for (auto const& [en, fr] : pairs) {
    auto const a = ranked(classify_subjects(en, "en", shipped()));
    auto const b = ranked(classify_subjects(fr, "fr", shipped()));
    REQUIRE(!a.empty());
    REQUIRE(!b.empty());
    CHECK(a.front().first == b.front().first);
    CHECK(a.size() <= 6);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].second >= a[i].second);
  }
}

TEST_CASE("profiles round-trip") {
  std::stringstream ss;
  shipped().save(ss);
  auto const back = SubjectProfiles::load(ss);
  CHECK(back == shipped());
  std::stringstream bad("en\tx\ttoken\t1\n");
  CHECK_THROWS_AS(SubjectProfiles::load(bad), Error);
}
