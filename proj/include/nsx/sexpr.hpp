#pragma once

#include <memory>
#include <string>
#include <vector>

namespace nsx {

// Minimal S-expression reader/writer shared by the term, formula, script and
// bundle front ends.  Atoms keep their source offset for error reporting.
struct Sexpr {
  bool is_atom = false;
  std::string atom;
  std::vector<Sexpr> items;
  size_t pos = 0;

  static Sexpr symbol(const std::string& s) {
    Sexpr e;
    e.is_atom = true;
    e.atom = s;
    return e;
  }
  static Sexpr list(std::vector<Sexpr> xs) {
    Sexpr e;
    e.items = std::move(xs);
    return e;
  }

  bool is_list() const { return !is_atom; }
  size_t size() const { return items.size(); }
  const Sexpr& operator[](size_t i) const { return items[i]; }
  // Head symbol of a list, or empty string.
  std::string head() const;
  std::string to_string() const;
};

// Parses exactly one S-expression; trailing garbage is an error.
Sexpr parse_sexpr(const std::string& text);

// Parses a sequence of top-level S-expressions (file sections).
std::vector<Sexpr> parse_sexprs(const std::string& text);

}  // namespace nsx
