#include "emm/ingest.hpp"

#include "emm/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>

namespace emm {
namespace {

constexpr std::string_view kLanguageCodes =
    "aa ab ae af ak am an ar as av ay az ba be bg bi bm bn bo br bs ca ce ch co cr cs cu cv cy da de dv dz ee el en "
    "eo es et eu fa ff fi fj fo fr fy ga gd gl gn gu gv ha he hi ho hr ht hu hy hz ia id ie ig ii ik io is it iu ja "
    "jv ka kg ki kj kk kl km kn ko kr ks ku kv kw ky la lb lg li ln lo lt lu lv mg mh mi mk ml mn mr ms mt my na nb "
    "nd ne ng nl nn no nr nv ny oc oj om or os pa pi pl ps pt qu rm rn ro ru rw sa sc sd se sg sh si sk sl sm sn so "
    "sq sr ss st su sv sw ta te tg th ti tk tl tn to tr ts tt tw ty ug uk ur uz ve vi vo wa wo xh yi yo za zh zu";

constexpr std::string_view kCountryCodes =
    "AD AE AF AG AI AL AM AO AQ AR AS AT AU AW AX AZ BA BB BD BE BF BG BH BI BJ BL BM BN BO BQ BR BS BT BV BW BY BZ "
    "CA CC CD CF CG CH CI CK CL CM CN CO CR CU CV CW CX CY CZ DE DJ DK DM DO DZ EC EE EG EH ER ES ET FI FJ FK FM FO "
    "FR GA GB GD GE GF GG GH GI GL GM GN GP GQ GR GS GT GU GW GY HK HM HN HR HT HU ID IE IL IM IN IO IQ IR IS IT JE "
    "JM JO JP KE KG KH KI KM KN KP KR KW KY KZ LA LB LC LI LK LR LS LT LU LV LY MA MC MD ME MF MG MH MK ML MM MN MO "
    "MP MQ MR MS MT MU MV MW MX MY MZ NA NC NE NF NG NI NL NO NP NR NU NZ OM PA PE PF PG PH PK PL PM PN PR PS PT PW "
    "PY QA RE RO RS RU RW SA SB SC SD SE SG SH SI SJ SK SL SM SN SO SR SS ST SV SX SY SZ TC TD TF TG TH TJ TK TL TM "
    "TN TO TR TT TV TW TZ UA UG UM US UY UZ VA VC VE VG VI VN VU WF WS YE YT ZA ZM ZW";

bool in_code_table(std::string_view table, std::string_view code) {
  if (code.size() != 2) return false;
  for (std::size_t i = 0; i + 2 <= table.size(); i += 3) {
    if (table.substr(i, 2) == code) return true;
  }
  return false;
}

bool starts_with_icase(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

std::size_t find_icase(std::string_view s, std::size_t from, std::string_view needle) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (starts_with_icase(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

bool is_inline_tag(std::string_view tag) {
  static const std::set<std::string, std::less<>> kInline = {"a",    "abbr", "b",   "bdi", "bdo",  "cite",
                                                             "code", "em",   "font", "i",  "mark", "q",
                                                             "s",    "small", "span", "strong", "sub", "sup",
                                                             "u",    "wbr"};
  return kInline.count(tag) > 0;
}

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

constexpr std::array<NamedEntity, 48> kEntities = {{
    {"amp", U'&'},     {"lt", U'<'},      {"gt", U'>'},      {"quot", U'"'},    {"apos", U'\''},
    {"nbsp", 0xA0},    {"laquo", 0xAB},   {"raquo", 0xBB},   {"lsquo", 0x2018}, {"rsquo", 0x2019},
    {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"bdquo", 0x201E}, {"ndash", 0x2013}, {"mdash", 0x2014},
    {"hellip", 0x2026}, {"euro", 0x20AC}, {"copy", 0xA9},    {"reg", 0xAE},     {"deg", 0xB0},
    {"aacute", 0xE1},  {"eacute", 0xE9},  {"iacute", 0xED},  {"oacute", 0xF3},  {"uacute", 0xFA},
    {"agrave", 0xE0},  {"egrave", 0xE8},  {"igrave", 0xEC},  {"ograve", 0xF2},  {"ugrave", 0xF9},
    {"acirc", 0xE2},   {"ecirc", 0xEA},   {"icirc", 0xEE},   {"ocirc", 0xF4},   {"ucirc", 0xFB},
    {"auml", 0xE4},    {"euml", 0xEB},    {"iuml", 0xEF},    {"ouml", 0xF6},    {"uuml", 0xFC},
    {"Auml", 0xC4},    {"Ouml", 0xD6},    {"Uuml", 0xDC},    {"szlig", 0xDF},   {"ccedil", 0xE7},
    {"ntilde", 0xF1},  {"Eacute", 0xC9},  {"oslash", 0xF8},
}};

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    auto const semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    auto const name = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    if (name.size() > 1 && name[0] == '#') {
      unsigned long v = 0;
      bool ok = true;
      bool const hex = name[1] == 'x' || name[1] == 'X';
      auto const digits = name.substr(hex ? 2 : 1);
      if (digits.empty()) ok = false;
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || v > 0x10FFFF) {
          ok = false;
          break;
        }
        v = v * (hex ? 16 : 10) + static_cast<unsigned long>(d);
      }
      if (ok && v > 0 && v <= 0x10FFFF && !(v >= 0xD800 && v <= 0xDFFF)) cp = static_cast<char32_t>(v);
    } else {
      for (auto const& e : kEntities) {
        if (e.name == name) cp = e.cp;
      }
    }
    if (cp == 0) {
      out.push_back(s[i++]);
      continue;
    }
    text::append_utf8(out, cp);
    i = semi + 1;
  }
  return out;
}

std::string strip_tags_once(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      out.push_back(s[i++]);
      continue;
    }
    if (s.substr(i, 4) == "<!--") {
      auto const end = s.find("-->", i + 4);
      if (end == std::string_view::npos) break;
      i = end + 3;
      out.push_back(' ');
      continue;
    }
    char const next = i + 1 < s.size() ? s[i + 1] : '\0';
    bool const tag_start = std::isalpha(static_cast<unsigned char>(next)) || next == '/' || next == '!' || next == '?';
    auto const close = s.find('>', i + 1);
    if (!tag_start || close == std::string_view::npos) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t name_begin = i + 1 + (next == '/' ? 1 : 0);
    std::size_t name_end = name_begin;
    while (name_end < close && std::isalnum(static_cast<unsigned char>(s[name_end]))) ++name_end;
    std::string const name = text::lower(s.substr(name_begin, name_end - name_begin));
    if (next != '/' && (name == "script" || name == "style")) {
      auto const end = find_icase(s, close + 1, "</" + name);
      if (end == std::string_view::npos) break;
      auto const end_close = s.find('>', end);
      i = end_close == std::string_view::npos ? s.size() : end_close + 1;
      out.push_back(' ');
      continue;
    }
    if (!is_inline_tag(name)) out.push_back(' ');
    i = close + 1;
  }
  return out;
}

}  // namespace

bool is_language_code(std::string_view code) { return in_code_table(kLanguageCodes, code); }
bool is_country_code(std::string_view code) { return in_code_table(kCountryCodes, code); }

void SourceDescriptor::validate() const {
  if (source_id.empty()) throw Error("source without id");
  if (locator.empty()) throw Error("source " + source_id + ": empty locator");
  if (!is_language_code(language)) throw Error("source " + source_id + ": invalid language code '" + language + "'");
  if (!is_country_code(country)) throw Error("source " + source_id + ": invalid country code '" + country + "'");
  if (poll_interval < 1) throw Error("source " + source_id + ": poll interval must be >= 1");
}

std::vector<SourceDescriptor> load_sources(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open source list " + path.string());
  std::vector<SourceDescriptor> sources;
  std::string line;
  std::size_t lineno = 0;
  auto const base = path.parent_path();
  while (std::getline(in, line)) {
    ++lineno;
    auto const trimmed = text::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto const cols = text::split(trimmed, '\t');
    auto const where = path.string() + ":" + std::to_string(lineno) + ": ";
    if (cols.size() != 5) throw Error(where + "expected 5 tab-separated columns");
    SourceDescriptor src;
    src.source_id = text::trim(cols[0]);
    src.locator = text::trim(cols[1]);
    src.language = text::trim(cols[2]);
    src.country = text::trim(cols[3]);
    try {
      src.poll_interval = std::stoi(cols[4]);
    } catch (std::logic_error const&) {
      throw Error(where + "bad poll interval");
    }
    bool const remote = src.locator.rfind("http://", 0) == 0 || src.locator.rfind("https://", 0) == 0;
    if (!remote) {
      auto locator = src.locator;
      if (locator.rfind("file://", 0) == 0) locator = locator.substr(7);
      std::filesystem::path p(locator);
      if (p.is_relative()) p = base / p;
      src.locator = p.lexically_normal().string();
    }
    try {
      src.validate();
    } catch (Error const& e) {
      throw Error(where + e.what());
    }
    sources.push_back(std::move(src));
  }
  return sources;
}

std::string strip_html(std::string_view html) {
  std::string cur(html);
  for (int round = 0; round < 8; ++round) {
    auto next = text::clean_whitespace(decode_entities(strip_tags_once(cur)));
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::string make_article_id(std::string_view source_id, std::string_view url, std::string_view title) {
  std::string payload;
  payload.reserve(source_id.size() + url.size() + title.size() + 2);
  payload.append(source_id).push_back('\n');
  payload.append(url).push_back('\n');
  payload.append(title);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(payload.data(), payload.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (unsigned int i = 0; i < 16 && i < len; ++i) {
    id.push_back(kHex[digest[i] >> 4]);
    id.push_back(kHex[digest[i] & 0xF]);
  }
  return id;
}

Article normalize_article(RawItem const& raw, SourceDescriptor const& source) {
  auto clean = [](std::string_view s) { return text::nfc(strip_html(text::nfc(s))); };
  Article a;
  a.title = clean(raw.title);
  a.body = clean(raw.body);
  if (a.title.empty() && a.body.empty()) {
    throw Error("item from " + source.source_id + " (" + raw.url + ") has neither title nor body");
  }
  a.source_id = source.source_id;
  a.language = source.language;
  a.country = source.country;
  a.published_at = raw.published_at;
  a.url = text::trim(raw.url);
  a.article_id = make_article_id(a.source_id, a.url, a.title);
  return a;
}

ArticleStore::ArticleStore(ArticleStore const& other) {
  std::lock_guard lock(other.mutex_);
  articles_ = other.articles_;
}

ArticleStore& ArticleStore::operator=(ArticleStore const& other) {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    articles_ = other.articles_;
  }
  return *this;
}

bool ArticleStore::insert(Article article) {
  std::lock_guard lock(mutex_);
  auto id = article.article_id;
  auto [it, inserted] = articles_.try_emplace(std::move(id), article);
  if (!inserted) it->second = std::move(article);
  return inserted;
}

Article const* ArticleStore::find(std::string const& id) const {
  std::lock_guard lock(mutex_);
  auto const it = articles_.find(id);
  return it == articles_.end() ? nullptr : &it->second;
}

std::size_t ArticleStore::size() const {
  std::lock_guard lock(mutex_);
  return articles_.size();
}

std::vector<std::string> ArticleStore::languages() const {
  std::lock_guard lock(mutex_);
  std::set<std::string> langs;
  for (auto const& [id, a] : articles_) langs.insert(a.language);
  return {langs.begin(), langs.end()};
}

std::optional<Timestamp> ArticleStore::latest(std::string const& source_id) const {
  std::lock_guard lock(mutex_);
  std::optional<Timestamp> best;
  for (auto const& [id, a] : articles_) {
    if (a.source_id == source_id && (!best || a.published_at > *best)) best = a.published_at;
  }
  return best;
}

RssItem to_rss_item(Article const& article) {
  RssItem item;
  item.title = article.title;
  item.link = article.url;
  item.guid = article.article_id;
  item.description = article.body;
  item.pub_date = article.published_at;
  return item;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : text::to_u32(s)) {
    switch (cp) {
      case U'&': out += "&amp;"; break;
      case U'<': out += "&lt;"; break;
      case U'>': out += "&gt;"; break;
      case U'"': out += "&quot;"; break;
      default:
        // Characters outside the XML 1.0 Char production are dropped.
        if ((cp < 0x20 && cp != 0x9 && cp != 0xA && cp != 0xD) || (cp >= 0xFFFE && cp <= 0xFFFF)) continue;
        text::append_utf8(out, cp);
    }
  }
  return out;
}

std::string emit_rss(std::vector<RssItem> items, RssChannel const& channel) {
  std::stable_sort(items.begin(), items.end(), [](RssItem const& a, RssItem const& b) {
    if (a.pub_date != b.pub_date) return a.pub_date > b.pub_date;
    return a.guid < b.guid;
  });
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<rss version=\"2.0\">\n<channel>\n";
  out += "  <title>" + xml_escape(channel.title) + "</title>\n";
  out += "  <link>" + xml_escape(channel.link) + "</link>\n";
  out += "  <description>" + xml_escape(channel.description) + "</description>\n";
  if (!channel.language.empty()) out += "  <language>" + xml_escape(channel.language) + "</language>\n";
  for (auto const& item : items) {
    out += "  <item>\n";
    out += "    <title>" + xml_escape(item.title) + "</title>\n";
    if (!item.link.empty()) out += "    <link>" + xml_escape(item.link) + "</link>\n";
    out += "    <guid isPermaLink=\"false\">" + xml_escape(item.guid) + "</guid>\n";
    out += "    <pubDate>" + format_rfc822(item.pub_date) + "</pubDate>\n";
    for (auto const& c : item.categories) out += "    <category>" + xml_escape(c) + "</category>\n";
    out += "    <description>" + xml_escape(item.description) + "</description>\n";
    out += "  </item>\n";
  }
  out += "</channel>\n</rss>\n";
  return out;
}

}  // namespace emm
