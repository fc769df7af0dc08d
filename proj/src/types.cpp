#include "nsx/types.hpp"

#include "nsx/error.hpp"

namespace nsx {

FinType FinType::nat() {
  static const FinType n{std::make_shared<const Node>(Kind::Nat)};
  return n;
}

FinType FinType::arrow(FinType dom, FinType cod) {
  auto n = std::make_shared<Node>(Kind::Arrow);
  n->a = dom.node_;
  n->b = cod.node_;
  return FinType{std::move(n)};
}

FinType FinType::seq(FinType elem) {
  auto n = std::make_shared<Node>(Kind::Seq);
  n->a = elem.node_;
  return FinType{std::move(n)};
}

FinType FinType::meta(int id) {
  auto n = std::make_shared<Node>(Kind::Meta);
  n->meta = id;
  return FinType{std::move(n)};
}

bool FinType::operator==(const FinType& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Nat:
      return true;
    case Kind::Arrow:
      return dom() == o.dom() && cod() == o.cod();
    case Kind::Seq:
      return elem() == o.elem();
    case Kind::Meta:
      return meta_id() == o.meta_id();
  }
  return false;
}

bool FinType::is_concrete() const {
  switch (kind()) {
    case Kind::Nat:
      return true;
    case Kind::Arrow:
      return dom().is_concrete() && cod().is_concrete();
    case Kind::Seq:
      return elem().is_concrete();
    case Kind::Meta:
      return false;
  }
  return false;
}

int FinType::arity() const {
  int n = 0;
  FinType t = *this;
  while (t.is_arrow()) {
    ++n;
    t = t.cod();
  }
  return n;
}

FinType FinType::final_codomain() const {
  FinType t = *this;
  while (t.is_arrow()) t = t.cod();
  return t;
}

std::vector<FinType> FinType::argument_types() const {
  std::vector<FinType> out;
  FinType t = *this;
  while (t.is_arrow()) {
    out.push_back(t.dom());
    t = t.cod();
  }
  return out;
}

std::string FinType::to_string() const { return to_sexpr().to_string(); }

Sexpr FinType::to_sexpr() const {
  switch (kind()) {
    case Kind::Nat:
      return Sexpr::symbol("nat");
    case Kind::Arrow:
      return Sexpr::list({Sexpr::symbol("->"), dom().to_sexpr(), cod().to_sexpr()});
    case Kind::Seq:
      return Sexpr::list({Sexpr::symbol("seq"), elem().to_sexpr()});
    case Kind::Meta:
      return Sexpr::symbol("?" + std::to_string(meta_id()));
  }
  return Sexpr::symbol("nat");
}

FinType FinType::from_sexpr(const Sexpr& e) {
  if (e.is_atom) {
    if (e.atom == "nat") return nat();
    throw SyntaxError(e.pos, "unknown type '" + e.atom + "'");
  }
  const std::string h = e.head();
  if (h == "->") {
    if (e.size() < 3) throw SyntaxError(e.pos, "'->' needs two arguments");
    // Right-associated n-ary arrows are accepted for convenience.
    FinType t = from_sexpr(e[e.size() - 1]);
    for (size_t i = e.size() - 1; i-- > 1;) t = arrow(from_sexpr(e[i]), t);
    return t;
  }
  if (h == "seq") {
    if (e.size() != 2) throw SyntaxError(e.pos, "'seq' needs one argument");
    return seq(from_sexpr(e[1]));
  }
  throw SyntaxError(e.pos, "unknown type form '" + h + "'");
}

FinType FinType::parse(const std::string& text) {
  return from_sexpr(parse_sexpr(text));
}

FinType type_real() { return FinType::arrow(FinType::nat(), FinType::nat()); }

FinType type_real_fun() { return FinType::arrow(type_real(), type_real()); }

}  // namespace nsx
