#include "nsx/sexpr.hpp"

#include <cctype>
#include <sstream>

#include "nsx/error.hpp"

namespace nsx {

std::string Sexpr::head() const {
  if (is_atom || items.empty() || !items[0].is_atom) return "";
  return items[0].atom;
}

std::string Sexpr::to_string() const {
  if (is_atom) return atom;
  std::ostringstream out;
  out << '(';
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out << ' ';
    out << items[i].to_string();
  }
  out << ')';
  return out.str();
}

namespace {

struct Reader {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  Sexpr read() {
    skip_ws();
    if (pos >= text.size()) throw SyntaxError(pos, "unexpected end of input");
    size_t start = pos;
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Sexpr e;
      e.pos = start;
      while (true) {
        skip_ws();
        if (pos >= text.size()) throw SyntaxError(start, "unclosed '('");
        if (text[pos] == ')') {
          ++pos;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == ')') throw SyntaxError(pos, "unexpected ')'");
    Sexpr e;
    e.is_atom = true;
    e.pos = start;
    while (pos < text.size()) {
      char d = text[pos];
      if (d == '(' || d == ')' || d == ';' ||
          std::isspace(static_cast<unsigned char>(d)))
        break;
      e.atom.push_back(d);
      ++pos;
    }
    return e;
  }
};

}  // namespace

Sexpr parse_sexpr(const std::string& text) {
  Reader r{text};
  Sexpr e = r.read();
  r.skip_ws();
  if (r.pos != text.size())
    throw SyntaxError(r.pos, "trailing input after expression");
  return e;
}

std::vector<Sexpr> parse_sexprs(const std::string& text) {
  Reader r{text};
  std::vector<Sexpr> out;
  while (true) {
    r.skip_ws();
    if (r.pos >= text.size()) break;
    out.push_back(r.read());
  }
  return out;
}

}  // namespace nsx
