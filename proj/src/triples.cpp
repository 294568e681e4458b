#include "entrank/triples.hpp"

#include <cctype>
#include <cstdint>
#include <stdexcept>

namespace entrank {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    throw std::invalid_argument("code point out of range");
  }
}

class Cursor {
 public:
  Cursor(std::string_view text, std::map<std::string, std::string>& prefixes)
      : text_(text), prefixes_(prefixes) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\r' || text_[pos_] == '\n'))
      ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(what + " at column " + std::to_string(pos_ + 1));
  }

  Term term(bool allow_literal) {
    skip_ws();
    const char c = peek();
    if (c == '<') return Term{Term::Kind::iri, iri(), {}, {}};
    if (c == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
      pos_ += 2;
      return Term{Term::Kind::blank, name_token(), {}, {}};
    }
    if (c == '"') {
      if (!allow_literal) fail("literal not allowed here");
      return literal();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return Term{Term::Kind::iri, prefixed(), {}, {}};
    fail("unexpected character");
  }

  std::string iri() {
    expect('<');
    const auto end = text_.find('>', pos_);
    if (end == std::string_view::npos) fail("unterminated IRI");
    std::string value(text_.substr(pos_, end - pos_));
    for (char ch : value)
      if (ch == ' ' || ch == '<' || ch == '"') fail("invalid character in IRI");
    pos_ = end + 1;
    return value;
  }

  std::string name_token() {
    const auto start = pos_;
    while (!at_end()) {
      const char ch = peek();
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.' ||
          ch == ':' || ch == '%' || ch == '/' || ch == '#' || static_cast<unsigned char>(ch) >= 0x80) {
        ++pos_;
      } else {
        break;
      }
    }
    // A trailing '.' belongs to the statement terminator.
    while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string prefixed() {
    const std::string token = name_token();
    const auto colon = token.find(':');
    if (colon == std::string::npos) fail("expected prefixed name");
    const auto it = prefixes_.find(token.substr(0, colon));
    if (it == prefixes_.end()) fail("unknown prefix '" + token.substr(0, colon) + "'");
    return it->second + token.substr(colon + 1);
  }

  Term literal() {
    expect('"');
    Term t{Term::Kind::literal, {}, {}, {}};
    while (true) {
      if (at_end()) fail("unterminated literal");
      const char ch = text_[pos_++];
      if (ch == '"') break;
      if (ch != '\\') {
        t.value += ch;
        continue;
      }
      if (at_end()) fail("dangling escape");
      const char esc = text_[pos_++];
      switch (esc) {
        case 't': t.value += '\t'; break;
        case 'n': t.value += '\n'; break;
        case 'r': t.value += '\r'; break;
        case 'b': t.value += '\b'; break;
        case 'f': t.value += '\f'; break;
        case '"': t.value += '"'; break;
        case '\'': t.value += '\''; break;
        case '\\': t.value += '\\'; break;
        case 'u': append_utf8(t.value, hex(4)); break;
        case 'U': append_utf8(t.value, hex(8)); break;
        default: fail("unknown escape");
      }
    }
    if (peek() == '@') {
      ++pos_;
      const auto start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      if (pos_ == start) fail("empty language tag");
      t.language = std::string(text_.substr(start, pos_ - start));
    } else if (peek() == '^') {
      ++pos_;
      expect('^');
      t.datatype = peek() == '<' ? iri() : prefixed();
    }
    return t;
  }

  std::uint32_t hex(int digits) {
    if (pos_ + digits > text_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      const char ch = text_[pos_++];
      cp <<= 4;
      if (ch >= '0' && ch <= '9') cp |= static_cast<std::uint32_t>(ch - '0');
      else if (ch >= 'a' && ch <= 'f') cp |= static_cast<std::uint32_t>(ch - 'a' + 10);
      else if (ch >= 'A' && ch <= 'F') cp |= static_cast<std::uint32_t>(ch - 'A' + 10);
      else fail("bad hex digit");
    }
    return cp;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::string_view rest() const { return text_.substr(pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string>& prefixes_;
};

}  // namespace

std::optional<Triple> parse_triple_line(std::string_view line,
                                        std::map<std::string, std::string>& prefixes) {
  Cursor cur(line, prefixes);
  cur.skip_ws();
  if (cur.at_end() || cur.peek() == '#') return std::nullopt;

  if (cur.rest().starts_with("@prefix")) {
    cur.advance(7);
    cur.skip_ws();
    const auto rest = cur.rest();
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) cur.fail("expected prefix name");
    std::string name(rest.substr(0, colon));
    cur.advance(colon + 1);
    cur.skip_ws();
    std::string iri = cur.iri();
    cur.skip_ws();
    cur.expect('.');
    prefixes[name] = std::move(iri);
    return std::nullopt;
  }

  Triple t;
  t.subject = cur.term(false);
  t.predicate = cur.term(false);
  if (t.predicate.kind != Term::Kind::iri) cur.fail("predicate must be an IRI");
  t.object = cur.term(true);
  cur.skip_ws();
  cur.expect('.');
  cur.skip_ws();
  if (!cur.at_end() && cur.peek() != '#') cur.fail("trailing content after '.'");
  return t;
}

std::string escape_literal(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace entrank
