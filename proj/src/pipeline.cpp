#include "emm/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>

namespace emm {

Resources Resources::load(Config const& config) {
  auto const& d = config.data_dir;
  Resources r;
  auto defs = catdsl::load_definitions(d / "categories");
  for (auto const& def : defs) {
    if (!def.country.empty()) r.category_country[def.category_id] = def.country;
  }
  r.categories = std::make_unique<catdsl::CategoryMatcher>(std::move(defs));
  r.gazetteer = geo::Gazetteer::load(d / "gazetteer.tsv");
  r.gazetteer.validate();
  r.geostop = geo::GeoStopList::load(d / "geostop");
  r.name_params = names::NameParams::load(d / "names");
  r.normalizer = names::NameNormalizer::load(d / "names");
  r.models = cluster::BackgroundModels::load(d / "models");
  auto const classes = d / "subjects" / "classes.tsv";
  if (std::filesystem::exists(classes)) r.subject_codes = subject::SubjectThesaurus::load(classes).codes();
  return r;
}

std::string RoundReport::to_json() const {
  nlohmann::json j;
  j["round"] = format_iso8601(round);
  j["new_articles"] = new_articles;
  for (auto const& [lang, c] : languages) {
    j["languages"][lang] = {{"window_articles", c.window_articles}, {"clusters", c.clusters}};
  }
  j["breaking"] = nlohmann::json::array();
  for (auto const& f : breaking) {
    j["breaking"].push_back({{"cluster", f.cluster_id}, {"reason", cluster::to_string(f.reason)}});
  }
  j["language_pairs"] = language_pairs;
  j["links"] = links.size();
  j["alerts"] = nlohmann::json::array();
  for (auto const& a : alerts) {
    j["alerts"].push_back({{"country", a.key.country}, {"category", a.key.category}, {"level", a.level}});
  }
  j["diagnostics"] = diagnostics.size();
  j["seconds"] = seconds;
  return j.dump(2);
}

Pipeline::Pipeline(Config config, Resources const& resources, State state)
    : config_(std::move(config)), resources_(resources), state_(std::move(state)) {}

bool Pipeline::add_article(Article article) { return state_.articles.insert(std::move(article)); }

std::size_t Pipeline::ingest_items(std::vector<RawItem> const& items, SourceDescriptor const& source, Timestamp now,
                                   Diagnostics* diagnostics) {
  std::size_t added = 0;
  for (auto const& raw : items) {
    if (raw.published_at > now) continue;
    try {
      if (state_.articles.insert(normalize_article(raw, source))) ++added;
    } catch (Error const& e) {
      if (diagnostics) diagnostics->push_back({source.source_id, e.what()});
    }
  }
  return added;
}

std::size_t Pipeline::ingest(Timestamp now, Diagnostics* diagnostics) {
  if (config_.sources.empty()) return 0;
  auto const sources = load_sources(config_.sources);
  auto const fetched = fetch_feeds(sources, std::numeric_limits<Timestamp>::min());
  if (diagnostics) {
    diagnostics->insert(diagnostics->end(), fetched.diagnostics.begin(), fetched.diagnostics.end());
    for (auto const& e : fetched.errors) diagnostics->push_back({e.source_id, e.message});
  }
  std::map<std::string, SourceDescriptor const*> by_id;
  for (auto const& s : sources) by_id[s.source_id] = &s;
  std::size_t added = 0;
  for (auto const& item : fetched.items) {
    auto const it = by_id.find(item.source_id);
    if (it == by_id.end()) continue;
    added += ingest_items({item}, *it->second, now, diagnostics);
  }
  return added;
}

cluster::KeywordVector const& Pipeline::vector_of(Article const& a) const {
  auto const it = vectors_.find(a.article_id);
  if (it != vectors_.end()) return it->second;
  return vectors_.emplace(a.article_id, cluster::vectorize(a, resources_.models.find(a.language))).first->second;
}

void Pipeline::annotate(State& s, Article const& a, Diagnostics& diags) const {
  Annotation ann;
  auto const source = text::article_text(a.title, a.body);
  auto const tokens = text::tokenize(source);

  ann.categories = resources_.categories->classify(a);

  auto const& params = resources_.name_params.get(a.language);
  names::MergeParams merge;
  merge.threshold = config_.tau_name;
  auto mentions = names::recognize_names(source, tokens, params, &s.entities);
  geo::GeoContext ctx;
  ctx.source_country = a.country;
  for (auto& m : mentions) {
    ctx.name_spans.push_back({m.token_begin, m.token_end});
    m.entity = s.entities.merge_variant(m, resources_.normalizer, merge, &diags);
    if (m.entity) ann.entities.push_back(*m.entity);
  }

  auto const places = geo::geo_disambiguate(geo::geo_parse(tokens, a.language, resources_.gazetteer, resources_.geostop),
                                            ctx, resources_.gazetteer);
  ann.countries = geo::country_vector(places, resources_.gazetteer);
  ann.major_location = geo::major_location(places, resources_.gazetteer);

  for (auto& q : quotes::extract_quotes(source, tokens, mentions, params, config_.quote_marks, a.article_id)) {
    s.quotes.push_back(std::move(q));
  }

  std::set<std::string> countries, categories;
  for (auto const& [c, n] : ann.countries) countries.insert(c);
  for (auto const& cat : ann.categories) {
    auto const it = resources_.category_country.find(cat);
    if (it != resources_.category_country.end()) {
      countries.insert(it->second);
    } else {
      categories.insert(cat);
    }
  }
  s.alerts.add(a.article_id, countries, categories, a.published_at);
  s.annotations[a.article_id] = std::move(ann);
}

xlink::ClusterSignature Pipeline::signature(cluster::Cluster const& c) const { return signature(state_, c); }

xlink::ClusterSignature Pipeline::signature(State const& state, cluster::Cluster const& c) const {
  xlink::ClusterSignature sig;
  std::string text;
  std::vector<names::EntityId> ents;
  for (auto const& id : c.members) {
    auto const* a = state.articles.find(id);
    if (!a) continue;
    text += text::article_text(a->title, a->body);
    text += '\n';
    for (auto const& [tok, w] : vector_of(*a)) sig.keyword[tok] += w;
    auto const ann = state.annotations.find(id);
    if (ann == state.annotations.end()) continue;
    for (auto const& [country, n] : ann->second.countries) sig.country[country] += n;
    ents.insert(ents.end(), ann->second.entities.begin(), ann->second.entities.end());
  }
  sig.entity = names::entity_vector(ents);
  if (config_.subjects_enabled) {
    sig.subject = subject::classify_subjects(text, c.language, state.profiles, config_.k);
  }
  return sig;
}

RoundReport Pipeline::run_round(Timestamp now) {
  auto const started = std::chrono::steady_clock::now();
  if (state_.last_round && now < *state_.last_round) {
    throw Error("round at " + format_iso8601(now) + " precedes the last round " + format_iso8601(*state_.last_round));
  }
  RoundReport report;
  report.round = now;

  State work = state_;
  bool const rerun = work.last_round && *work.last_round == now;
  auto const prior = rerun ? work.previous : work.clusters;
  auto const prior_round = rerun ? work.previous_round : work.last_round;

  if (config_.subjects_enabled && work.profiles.empty() && !config_.training.empty() &&
      std::filesystem::is_directory(config_.training)) {
    auto const docs = subject::load_training(config_.training);
    subject::TrainParams tp;
    tp.profile_size = config_.m;
    work.profiles = subject::train_profiles(docs, tp, resources_.subject_codes, &report.diagnostics);
  }

  // Annotate articles entering their first round, oldest first.
  std::map<std::string, std::vector<Article const*>> by_lang;
  std::vector<Article const*> fresh;
  for (auto const& [id, a] : work.articles.all()) {
    if (a.published_at > now) continue;
    by_lang[a.language].push_back(&a);
    if (!work.annotations.count(id)) fresh.push_back(&a);
  }
  std::sort(fresh.begin(), fresh.end(), [](Article const* x, Article const* y) {
    return x->published_at != y->published_at ? x->published_at < y->published_at : x->article_id < y->article_id;
  });
  for (auto const* a : fresh) annotate(work, *a, report.diagnostics);
  report.new_articles = fresh.size();

  // Cluster and chain per language.
  cluster::BreakingParams bp;
  bp.min_size = config_.s_min;
  bp.min_sources = config_.d_min;
  bp.rise_factor = config_.rise;
  std::map<std::string, std::vector<cluster::Cluster>> current;
  std::vector<cluster::BreakingNewsFlag> breaking;
  for (auto const& [lang, arts] : by_lang) {
    auto const window = cluster::select_window(arts, now, config_.window, config_.min_articles);
    std::vector<cluster::KeywordVector> vecs;
    vecs.reserve(window.size());
    std::set<std::string> in_window;
    for (auto const* a : window) {
      vecs.push_back(vector_of(*a));
      in_window.insert(a->article_id);
    }
    auto clusters = cluster::cluster_window(window, vecs, config_.theta, now);
    static std::vector<cluster::Cluster> const kNone;
    auto const prev = prior.find(lang);
    cluster::chain_clusters(clusters, prev == prior.end() ? kNone : prev->second, in_window);
    for (auto const& c : clusters) {
      std::set<std::string> sources;
      for (auto const* list : {&c.members, &c.attached}) {
        for (auto const& id : *list) {
          if (auto const* a = work.articles.find(id)) sources.insert(a->source_id);
        }
      }
      if (auto f = cluster::detect_breaking(c, sources.size(), now, bp)) breaking.push_back(std::move(*f));
      for (auto const& id : c.members) {
        auto const ann = work.annotations.find(id);
        if (ann == work.annotations.end()) continue;
        for (auto e : ann->second.entities) work.entities.add_cluster_ref(e, c.chain_id);
      }
    }
    report.languages[lang] = {window.size(), clusters.size()};
    current[lang] = std::move(clusters);
  }
  work.previous = prior;
  work.previous_round = prior_round;
  work.clusters = std::move(current);
  work.breaking = breaking;
  work.last_round = now;

  // Cross-language links.
  xlink::ClustersByLanguage signed_clusters;
  for (auto const& [lang, list] : work.clusters) {
    auto& out = signed_clusters[lang];
    for (auto const& c : list) out.push_back({c.cluster_id, signature(work, c)});
  }
  auto const linked = xlink::link_clusters(signed_clusters, config_.tau_link, config_.weights);
  work.links[day_of(now)] = linked.edges;

  // Alerts.
  alerts::AlertParams ap;
  ap.rho = config_.rho;
  ap.c_min = config_.c_min;
  ap.weekday_normalization = config_.weekday_normalization;
  auto raised = work.alerts.evaluate(now, ap);
  work.alerts.prune(now, ap);
  work.alert_log.insert(work.alert_log.end(), raised.begin(), raised.end());

  state_ = std::move(work);
  report.breaking = std::move(breaking);
  report.links = linked.edges;
  report.language_pairs = linked.language_pairs;
  report.alerts = std::move(raised);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::vector<std::set<names::EntityId>> cluster_entities(State const& state) {
  std::vector<std::set<names::EntityId>> out;
  for (auto const& [lang, list] : state.clusters) {
    for (auto const& c : list) {
      std::set<names::EntityId> ids;
      for (auto const& id : c.members) {
        auto const ann = state.annotations.find(id);
        if (ann != state.annotations.end()) ids.insert(ann->second.entities.begin(), ann->second.entities.end());
      }
      out.push_back(std::move(ids));
    }
  }
  return out;
}

xlink::EntityProfile entity_profile(State const& state, names::EntityId id) {
  auto const* e = state.entities.find(id);
  if (!e) throw NotFound("no entity " + std::to_string(id));
  // Story ids carry the language of the cluster that started them.
  std::map<std::string, std::string> story_language;
  for (auto const& ref : e->cluster_refs) {
    auto const rest = ref.rfind("story-", 0) == 0 ? ref.substr(6) : ref;
    story_language[ref] = rest.substr(0, rest.find('-'));
  }
  auto const sets = cluster_entities(state);
  return xlink::fuse_entity_profile(id, state.entities, story_language, state.quotes, names::cooccurrence(sets));
}

}  // namespace emm
