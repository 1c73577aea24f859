#include "emars/literal.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <vector>

#include "emars/error.hpp"

namespace emars {

namespace {

bool is_tag_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-'; }

std::size_t scan_quoted(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;
  while (i < text.size() && text[i] != '"') {
    i += text[i] == '\\' ? 2 : 1;
  }
  return i < text.size() ? i + 1 - pos : 0;
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw DatatypeError("malformed literal '" + std::string(text_) + "': " + what);
  }

  void skip_ws() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }
  bool at_end() {
    skip_ws();
    return i_ >= text_.size();
  }
  bool peek(char c) {
    skip_ws();
    return i_ < text_.size() && text_[i_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string word() {
    skip_ws();
    std::size_t start = i_;
    while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) ++i_;
    if (start == i_) fail("expected identifier");
    return std::string(text_.substr(start, i_ - start));
  }

  // Unquoted value up to the next ',' or ')'.
  std::string bare() {
    skip_ws();
    std::size_t start = i_;
    while (i_ < text_.size() && text_[i_] != ',' && text_[i_] != ')') ++i_;
    std::size_t end = i_;
    while (end > start && std::isspace(static_cast<unsigned char>(text_[end - 1]))) --end;
    if (start == end) fail("empty field");
    return std::string(text_.substr(start, end - start));
  }

  std::string quoted() {
    skip_ws();
    if (i_ >= text_.size() || text_[i_] != '"') fail("expected string");
    std::string out;
    ++i_;
    while (i_ < text_.size() && text_[i_] != '"') {
      char c = text_[i_++];
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (i_ >= text_.size()) fail("dangling escape");
      char e = text_[i_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"':
        case '\\': out.push_back(e); break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    if (i_ >= text_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  std::string lang_suffix() {
    std::size_t start = i_;
    while (i_ < text_.size() && is_tag_char(text_[i_])) ++i_;
    if (start == i_) fail("expected language tag after '@'");
    return std::string(text_.substr(start, i_ - start));
  }

  std::size_t pos() const { return i_; }
  void set_pos(std::size_t p) { i_ = p; }
  std::string_view text() const { return text_; }

 private:
  std::string_view text_;
  std::size_t i_ = 0;
};

// Fields of a call-shaped literal: positional values first, then key=value.
struct Fields {
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;
};

Fields read_fields(Cursor& c) {
  Fields f;
  c.expect('(');
  if (c.accept(')')) return f;
  do {
    std::size_t save = c.pos();
    c.skip_ws();
    bool named = false;
    if (c.pos() < c.text().size() && (std::isalpha(static_cast<unsigned char>(c.text()[c.pos()])))) {
      std::string key = c.word();
      if (c.accept('=')) {
        std::string value = c.peek('"') ? c.quoted() : c.bare();
        if (!f.named.emplace(key, value).second) c.fail("duplicate field " + key);
        named = true;
      }
    }
    if (!named) {
      c.set_pos(save);
      if (!f.named.empty()) c.fail("positional field after named field");
      f.positional.push_back(c.bare());
    }
  } while (c.accept(','));
  c.expect(')');
  return f;
}

std::optional<std::string> take(Fields& f, const std::string& key) {
  auto it = f.named.find(key);
  if (it == f.named.end()) return std::nullopt;
  std::string v = it->second;
  f.named.erase(it);
  return v;
}

double parse_double(Cursor& c, const std::string& s) {
  double d = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc() || ptr != s.data() + s.size()) c.fail("invalid number '" + s + "'");
  return d;
}

bool is_empty_marker(const Fields& f) { return f.positional.size() == 1 && f.positional[0] == "empty"; }

void require_consumed(Cursor& c, const Fields& f) {
  if (!f.named.empty()) c.fail("unknown field " + f.named.begin()->first);
}

DataValue parse_time(Cursor& c) {
  Fields f = read_fields(c);
  if (is_empty_marker(f) && f.named.empty()) return TimeValue::empty_value();
  if (!f.positional.empty()) c.fail("time fields must be named");
  auto main = take(f, "main");
  if (!main) c.fail("time requires main=");
  const Seconds m = parse_timestamp(*main);
  auto earliest = take(f, "earliest");
  auto latest = take(f, "latest");
  auto tz = take(f, "tz");
  auto calendar = take(f, "calendar");
  require_consumed(c, f);
  return TimeValue::make(m, earliest ? parse_timestamp(*earliest) : m, latest ? parse_timestamp(*latest) : m,
                         tz ? parse_tz(*tz) : 0, calendar.value_or(""));
}

DataValue parse_qty(Cursor& c) {
  Fields f = read_fields(c);
  std::string unit = take(f, "unit").value_or("1");
  if (is_empty_marker(f)) {
    require_consumed(c, f);
    return QuantityValue::empty_value(unit);
  }
  auto main = take(f, "main");
  auto lower = take(f, "lower");
  auto upper = take(f, "upper");
  if (!f.positional.empty()) {
    if (main || lower || upper || f.positional.size() > 3) c.fail("mixed quantity fields");
    main = f.positional[0];
    if (f.positional.size() > 1) lower = f.positional[1];
    if (f.positional.size() > 2) upper = f.positional[2];
  }
  require_consumed(c, f);
  if (!main) c.fail("quantity requires an amount");
  Decimal m = Decimal::parse(*main);
  return QuantityValue::make(m, lower ? Decimal::parse(*lower) : m, upper ? Decimal::parse(*upper) : m, unit);
}

DataValue parse_geo(Cursor& c) {
  Fields f = read_fields(c);
  std::string globe = take(f, "globe").value_or("Q2");
  if (is_empty_marker(f)) {
    require_consumed(c, f);
    return GeoCoordinatesValue::empty_value(globe);
  }
  if (!f.positional.empty()) c.fail("geo fields must be named");
  auto lat = take(f, "lat");
  auto lon = take(f, "lon");
  if (!lat || !lon) c.fail("geo requires lat= and lon=");
  const double la = parse_double(c, *lat);
  const double lo = parse_double(c, *lon);
  if (auto precision = take(f, "precision")) {
    require_consumed(c, f);
    return GeoCoordinatesValue::make(la, lo, parse_double(c, *precision), globe);
  }
  auto num = [&](const char* key, double dflt) {
    auto v = take(f, key);
    return v ? parse_double(c, *v) : dflt;
  };
  const double lat_min = num("lat_min", la);
  const double lat_max = num("lat_max", la);
  const double lon_min = num("lon_min", lo);
  const double lon_max = num("lon_max", lo);
  require_consumed(c, f);
  return GeoCoordinatesValue::make_bounds(la, lo, lat_min, lat_max, lon_min, lon_max, globe);
}

DataValue parse_multi(Cursor& c) {
  std::map<std::string, std::string> texts;
  c.expect('(');
  if (!c.accept(')')) {
    do {
      std::string tag = c.word();
      while (c.accept('-')) tag += "-" + c.word();
      c.expect('=');
      std::string text = c.quoted();
      if (!texts.emplace(canonical_lang_tag(tag), std::move(text)).second) c.fail("duplicate language tag " + tag);
    } while (c.accept(','));
    c.expect(')');
  }
  return MultilingualTextValue::make(texts);
}

}  // namespace

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(ch);
    }
  }
  out.push_back('"');
  return out;
}

std::string format_double(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, ptr);
}

std::string format_value(const DataValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IriValue>) {
          return "<" + x.iri + ">";
        } else if constexpr (std::is_same_v<T, StringValue>) {
          return quote_string(x.text);
        } else if constexpr (std::is_same_v<T, MonolingualTextValue>) {
          return quote_string(x.text) + "@" + x.lang;
        } else if constexpr (std::is_same_v<T, MultilingualTextValue>) {
          std::string out = "multi(";
          bool first = true;
          for (const auto& [tag, text] : x.texts) {
            if (!first) out += ", ";
            first = false;
            out += tag + "=" + quote_string(text);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, QuantityValue>) {
          if (x.empty) return "qty(empty, unit=" + x.unit + ")";
          return "qty(" + x.main.to_string() + ", " + x.lower.to_string() + ", " + x.upper.to_string() +
                 ", unit=" + x.unit + ")";
        } else if constexpr (std::is_same_v<T, GeoCoordinatesValue>) {
          if (x.empty) return "geo(empty, globe=" + x.globe + ")";
          return "geo(lat=" + format_double(x.lat) + ", lon=" + format_double(x.lon) +
                 ", lat_min=" + format_double(x.lat_min) + ", lat_max=" + format_double(x.lat_max) +
                 ", lon_min=" + format_double(x.lon_min) + ", lon_max=" + format_double(x.lon_max) +
                 ", globe=" + x.globe + ")";
        } else {
          if (x.empty) return "time(empty)";
          std::string out = "time(main=" + format_timestamp(x.main) + ", earliest=" + format_timestamp(x.earliest) +
                            ", latest=" + format_timestamp(x.latest) + ", tz=" + format_tz(x.tz_minutes);
          if (!x.calendar.empty()) out += ", calendar=" + x.calendar;
          return out + ")";
        }
      },
      v);
}

std::size_t scan_value(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  const char c = text[pos];
  if (c == '"') {
    std::size_t n = scan_quoted(text, pos);
    if (n == 0) return 0;
    std::size_t end = pos + n;
    if (end < text.size() && text[end] == '@' && end + 1 < text.size() && is_tag_char(text[end + 1])) {
      ++end;
      while (end < text.size() && is_tag_char(text[end])) ++end;
    }
    return end - pos;
  }
  if (c == '<') {
    std::size_t end = text.find('>', pos + 1);
    if (end == std::string_view::npos) return 0;
    for (std::size_t i = pos + 1; i < end; ++i) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) return 0;
    }
    return end + 1 - pos;
  }
  for (std::string_view kw : {"time", "qty", "geo", "multi"}) {
    if (text.substr(pos).starts_with(kw) && pos + kw.size() < text.size() && text[pos + kw.size()] == '(') {
      int depth = 0;
      for (std::size_t i = pos + kw.size(); i < text.size();) {
        if (text[i] == '"') {
          std::size_t n = scan_quoted(text, i);
          if (n == 0) return 0;
          i += n;
          continue;
        }
        if (text[i] == '(') ++depth;
        if (text[i] == ')' && --depth == 0) return i + 1 - pos;
        ++i;
      }
      return 0;
    }
  }
  return 0;
}

DataValue parse_value(std::string_view text) {
  Cursor c(text);
  c.skip_ws();
  DataValue out;
  if (c.peek('"')) {
    std::string s = c.quoted();
    if (c.pos() < text.size() && text[c.pos()] == '@') {
      c.set_pos(c.pos() + 1);
      std::string tag = c.lang_suffix();
      out = MonolingualTextValue::make(std::move(s), tag);
    } else {
      out = StringValue{std::move(s)};
    }
  } else if (c.accept('<')) {
    std::size_t end = text.find('>', c.pos());
    if (end == std::string_view::npos) c.fail("unterminated IRI");
    out = IriValue{std::string(text.substr(c.pos(), end - c.pos()))};
    c.set_pos(end + 1);
  } else {
    std::string kind = c.word();
    if (kind == "time") {
      out = parse_time(c);
    } else if (kind == "qty") {
      out = parse_qty(c);
    } else if (kind == "geo") {
      out = parse_geo(c);
    } else if (kind == "multi") {
      out = parse_multi(c);
    } else {
      c.fail("unknown literal kind " + kind);
    }
  }
  if (!c.at_end()) c.fail("trailing characters");
  return out;
}

}  // namespace emars
