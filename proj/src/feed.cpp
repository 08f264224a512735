#include "emm/ingest.hpp"

#include "emm/text.hpp"

#include <expat.h>
#include <httplib.h>

#include <fstream>
#include <future>
#include <sstream>

namespace emm {
namespace {

enum class Field { None, Title, Link, Description, Content, Date, Guid };

struct FeedState {
  std::string source_id;
  ParsedFeed result;
  std::vector<std::string> stack;
  bool in_item = false;
  int item_depth = 0;
  RawItem current;
  std::string date_text;
  std::string description;
  std::string content;
  Field field = Field::None;
  std::string buffer;
  std::size_t item_index = 0;
};

Field classify(std::string_view name, bool atom) {
  if (name == "title") return Field::Title;
  if (name == "link") return Field::Link;
  if (name == "description" || name == "summary") return Field::Description;
  if (name == "content:encoded" || (atom && name == "content")) return Field::Content;
  if (name == "pubDate" || name == "dc:date" || name == "published" || name == "updated") return Field::Date;
  if (name == "guid" || (atom && name == "id")) return Field::Guid;
  return Field::None;
}

void XMLCALL on_start(void* data, XML_Char const* name, XML_Char const** attrs) {
  auto& st = *static_cast<FeedState*>(data);
  std::string_view const n = name;
  st.stack.emplace_back(n);
  if (!st.in_item && (n == "item" || n == "entry")) {
    st.in_item = true;
    st.item_depth = static_cast<int>(st.stack.size());
    st.current = RawItem{};
    st.current.source_id = st.source_id;
    st.date_text.clear();
    st.description.clear();
    st.content.clear();
    return;
  }
  if (!st.in_item) {
    if (n == "title" && st.stack.size() <= 3) {
      st.field = Field::Title;
      st.buffer.clear();
    }
    return;
  }
  if (static_cast<int>(st.stack.size()) != st.item_depth + 1) return;
  bool const atom = st.stack.front() == "feed";
  st.field = classify(n, atom);
  st.buffer.clear();
  if (st.field == Field::Link && atom) {
    // <link rel="alternate" href="..."/>
    std::string href;
    std::string rel = "alternate";
    for (int i = 0; attrs[i]; i += 2) {
      std::string_view const key = attrs[i];
      if (key == "href") href = attrs[i + 1];
      if (key == "rel") rel = attrs[i + 1];
    }
    if (rel == "alternate" && st.current.url.empty()) st.current.url = href;
    st.field = Field::None;
  }
}

void XMLCALL on_text(void* data, XML_Char const* s, int len) {
  auto& st = *static_cast<FeedState*>(data);
  if (st.field != Field::None) st.buffer.append(s, static_cast<std::size_t>(len));
}

void XMLCALL on_end(void* data, XML_Char const* name) {
  auto& st = *static_cast<FeedState*>(data);
  std::string_view const n = name;
  if (st.in_item && static_cast<int>(st.stack.size()) == st.item_depth && (n == "item" || n == "entry")) {
    st.in_item = false;
    ++st.item_index;
    auto& item = st.current;
    item.body = !st.content.empty() ? st.content : st.description;
    auto const where = st.source_id + " item " + std::to_string(st.item_index);
    auto const when = parse_timestamp(st.date_text);
    if (!when) {
      st.result.diagnostics.push_back({where, "missing or unparseable date '" + st.date_text + "'"});
    } else if (text::trim(item.title).empty() && text::trim(item.body).empty()) {
      st.result.diagnostics.push_back({where, "item has neither title nor body"});
    } else {
      item.published_at = *when;
      if (item.guid.empty()) item.guid = item.url;
      st.result.items.push_back(std::move(item));
    }
  } else if (st.field != Field::None) {
    std::string value = std::move(st.buffer);
    st.buffer.clear();
    if (!st.in_item) {
      if (st.result.title.empty()) st.result.title = text::trim(value);
    } else {
      switch (st.field) {
        case Field::Title: st.current.title = value; break;
        case Field::Link: st.current.url = text::trim(value); break;
        case Field::Description: st.description = value; break;
        case Field::Content: st.content = value; break;
        case Field::Date:
          // Prefer the publication date over a later update stamp.
          if (st.date_text.empty() || n == "pubDate" || n == "published") st.date_text = text::trim(value);
          break;
        case Field::Guid: st.current.guid = text::trim(value); break;
        case Field::None: break;
      }
    }
    st.field = Field::None;
  }
  if (!st.stack.empty()) st.stack.pop_back();
}

std::string read_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string http_get(std::string const& url, std::chrono::milliseconds timeout) {
  auto const scheme_end = url.find("://");
  auto const path_start = url.find('/', scheme_end + 3);
  std::string const origin = url.substr(0, path_start);
  std::string const path = path_start == std::string::npos ? "/" : url.substr(path_start);
  httplib::Client client(origin);
  auto const secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto const usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) throw Error("request to " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("request to " + url + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace

ParsedFeed parse_feed(std::string_view xml, std::string const& source_id) {
  FeedState st;
  st.source_id = source_id;
  XML_Parser parser = XML_ParserCreate(nullptr);
  XML_SetUserData(parser, &st);
  XML_SetElementHandler(parser, on_start, on_end);
  XML_SetCharacterDataHandler(parser, on_text);
  if (XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    st.result.diagnostics.push_back(
        {source_id.empty() ? "feed" : source_id,
         std::string("XML error at line ") + std::to_string(XML_GetCurrentLineNumber(parser)) + ": " +
             XML_ErrorString(XML_GetErrorCode(parser))});
  }
  XML_ParserFree(parser);
  return std::move(st.result);
}

FetchResult fetch_feeds(std::vector<SourceDescriptor> const& sources, Timestamp since, FetchOptions const& options) {
  std::vector<std::future<ParsedFeed>> pending;
  pending.reserve(sources.size());
  for (auto const& src : sources) {
    pending.push_back(std::async(std::launch::async, [&src, &options] {
      bool const remote = src.locator.rfind("http://", 0) == 0 || src.locator.rfind("https://", 0) == 0;
      std::string const doc = remote ? http_get(src.locator, options.timeout) : read_file(src.locator);
      return parse_feed(doc, src.source_id);
    }));
  }
  FetchResult result;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    try {
      auto feed = pending[i].get();
      for (auto& item : feed.items) {
        if (item.published_at > since) result.items.push_back(std::move(item));
      }
      for (auto& d : feed.diagnostics) result.diagnostics.push_back(std::move(d));
    } catch (std::exception const& e) {
      result.errors.push_back({sources[i].source_id, e.what()});
    }
  }
  return result;
}

}  // namespace emm
