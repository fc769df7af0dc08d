#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nsx/sexpr.hpp"

namespace nsx {

// Simple types of the kernel: the base type of naturals, arrow types, and a
// dedicated type of finite sequences.  Values are immutable and cheap to copy.
class FinType {
 public:
  enum class Kind { Nat, Arrow, Seq, Meta };

  FinType() : FinType(nat()) {}

  static FinType nat();
  static FinType arrow(FinType dom, FinType cod);
  static FinType seq(FinType elem);
  // Unification placeholder used only inside the typechecker.
  static FinType meta(int id);

  Kind kind() const { return node_->kind; }
  bool is_nat() const { return kind() == Kind::Nat; }
  bool is_arrow() const { return kind() == Kind::Arrow; }
  bool is_seq() const { return kind() == Kind::Seq; }
  bool is_meta() const { return kind() == Kind::Meta; }

  FinType dom() const { return FinType(node_->a); }
  FinType cod() const { return FinType(node_->b); }
  FinType elem() const { return FinType(node_->a); }
  int meta_id() const { return node_->meta; }

  bool operator==(const FinType& o) const;
  bool operator!=(const FinType& o) const { return !(*this == o); }

  // Fully resolved: no Meta nodes anywhere.
  bool is_concrete() const;

  // Arity of the curried arrow spine; 0 for non-arrows.
  int arity() const;
  // Result type after consuming all curried arguments.
  FinType final_codomain() const;
  std::vector<FinType> argument_types() const;

  std::string to_string() const;
  Sexpr to_sexpr() const;
  static FinType from_sexpr(const Sexpr& e);
  static FinType parse(const std::string& text);

 private:
  struct Node {
    Kind kind;
    std::shared_ptr<const Node> a, b;
    int meta = -1;
    Node(Kind k) : kind(k) {}
  };
  std::shared_ptr<const Node> node_;
  explicit FinType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

// Common abbreviations used throughout the corpus: 1 := 0 -> 0 (reals as
// fast-converging Cauchy codes) and 2 := 1 -> 0.
FinType type_real();
FinType type_real_fun();

}  // namespace nsx
