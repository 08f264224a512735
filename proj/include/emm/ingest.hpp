#pragma once

#include "emm/error.hpp"
#include "emm/timeutil.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emm {

bool is_language_code(std::string_view code);  // ISO 639-1
bool is_country_code(std::string_view code);   // ISO 3166-1 alpha-2

struct SourceDescriptor {
  std::string source_id;
  std::string locator;   // file path or http(s) URL
  std::string language;  // ISO 639-1
  std::string country;   // ISO 3166-1 alpha-2
  int poll_interval = 300;

  // Throws Error when a code or the interval is invalid.
  void validate() const;
};

// Lines of `sources.tsv`: source_id, locator, language, country, interval.
// Relative file locators resolve against the file's directory.
std::vector<SourceDescriptor> load_sources(std::filesystem::path const& path);

struct RawItem {
  std::string source_id;
  std::string title;
  std::string body;
  std::string url;
  std::string guid;
  Timestamp published_at = 0;
};

struct Article {
  std::string article_id;
  std::string source_id;
  std::string language;
  std::string country;  // of the source; feeds geo disambiguation
  Timestamp published_at = 0;
  std::string title;
  std::string body;
  std::string url;

  friend bool operator==(Article const&, Article const&) = default;
};

struct ParsedFeed {
  std::string title;
  std::vector<RawItem> items;
  Diagnostics diagnostics;
};

// Parses an RSS 0.9x/1.0/2.0 or Atom document. Items without a usable date
// or without any text are skipped with a diagnostic. A syntax error stops
// parsing; items completed before it are kept.
ParsedFeed parse_feed(std::string_view xml, std::string const& source_id = {});

struct SourceError {
  std::string source_id;
  std::string message;
};

struct FetchResult {
  std::vector<RawItem> items;
  std::vector<SourceError> errors;
  Diagnostics diagnostics;
};

struct FetchOptions {
  std::chrono::milliseconds timeout{10000};
};

// Reads every source concurrently and returns items published strictly
// after `since`, in source order then document order. A failing source
// yields an error record and does not affect the others.
FetchResult fetch_feeds(std::vector<SourceDescriptor> const& sources, Timestamp since, FetchOptions const& options = {});

// Removes markup, decodes character references and drops script/style
// content. Repeats until stable so the result is a fixpoint.
std::string strip_html(std::string_view html);

// Deterministic id from (source_id, url, title).
std::string make_article_id(std::string_view source_id, std::string_view url, std::string_view title);

// NFC text with control characters and markup removed and whitespace
// collapsed. Throws Error when both title and body end up empty.
Article normalize_article(RawItem const& raw, SourceDescriptor const& source);

// Deduplicating article store. Inserting an id that already exists replaces
// the stored article (last write wins). Safe for concurrent inserts.
class ArticleStore {
 public:
  ArticleStore() = default;
  ArticleStore(ArticleStore const& other);
  ArticleStore& operator=(ArticleStore const& other);

  // Returns true when the id was new.
  bool insert(Article article);
  Article const* find(std::string const& id) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  // Ordered by id.
  std::map<std::string, Article> const& all() const { return articles_; }
  std::vector<std::string> languages() const;
  std::optional<Timestamp> latest(std::string const& source_id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Article> articles_;
};

struct RssChannel {
  std::string title = "EMM news";
  std::string link = "http://localhost/";
  std::string description;
  std::string language;
};

struct RssItem {
  std::string title;
  std::string link;
  std::string guid;
  std::string description;
  Timestamp pub_date = 0;
  std::vector<std::string> categories;
};

RssItem to_rss_item(Article const& article);

// RSS 2.0, UTF-8. Items sorted by pub_date descending, then guid.
std::string emit_rss(std::vector<RssItem> items, RssChannel const& channel);

std::string xml_escape(std::string_view s);

}  // namespace emm
