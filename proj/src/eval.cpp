#include "nsx/eval.hpp"

#include <sstream>

#include "nsx/error.hpp"
#include "nsx/parser.hpp"

namespace nsx {

ValuePtr Value::nat_v(Nat n) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Nat;
  v->nat = std::move(n);
  return v;
}

ValuePtr Value::seq_v(std::vector<ValuePtr> xs, FinType elem) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Seq;
  v->seq = std::move(xs);
  v->elem_type = std::move(elem);
  return v;
}

ValuePtr Value::native_v(std::string name,
                         std::function<ValuePtr(const ValuePtr&)> fn) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Native;
  v->native_name = std::move(name);
  v->native = std::move(fn);
  return v;
}

bool value_equal(const ValuePtr& a, const ValuePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Value::Kind::Nat:
      return a->nat == b->nat;
    case Value::Kind::Seq: {
      if (a->seq.size() != b->seq.size()) return false;
      for (size_t i = 0; i < a->seq.size(); ++i)
        if (!value_equal(a->seq[i], b->seq[i])) return false;
      return true;
    }
    default:
      return false;  // functional values compare by identity only
  }
}

std::string print_value(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Nat:
      return v->nat.str();
    case Value::Kind::Seq: {
      std::ostringstream out;
      bool nats = v->elem_type == FinType::nat();
      out << (nats ? "(seq0" : "(seqv");
      if (!nats) out << ' ' << v->elem_type.to_string();
      for (const auto& x : v->seq) out << ' ' << print_value(x);
      out << ')';
      return out.str();
    }
    case Value::Kind::Closure:
      return "(closure " + print_term(v->lam) + ")";
    case Value::Kind::Prim: {
      std::ostringstream out;
      out << "(prim " << v->prim;
      for (const auto& x : v->prim_args) out << ' ' << print_value(x);
      out << ')';
      return out.str();
    }
    case Value::Kind::Native:
      return "(native " + v->native_name + ")";
  }
  return "?";
}

ValuePtr canonical_value(const FinType& ty) {
  switch (ty.kind()) {
    case FinType::Kind::Nat:
      return Value::nat_v(0);
    case FinType::Kind::Seq:
      return Value::seq_v({}, ty.elem());
    case FinType::Kind::Arrow: {
      ValuePtr inner = canonical_value(ty.cod());
      return Value::native_v("canonical",
                             [inner](const ValuePtr&) { return inner; });
    }
    default:
      return Value::nat_v(0);
  }
}

void Fuel::tick(long long n) {
  left -= n;
  if (left < 0) throw FuelExhausted("step budget exceeded");
}

namespace {

int prim_arity(const std::string& name) {
  if (name == "succ" || name == "max" || name == "len") return 1;
  if (name == "add" || name == "mul" || name == "monus" || name == "le" ||
      name == "append" || name == "cons" || name == "index")
    return 2;
  if (name == "rec") return 3;
  return 0;
}

ValuePtr prim_value(const std::string& name, const FinType& ty) {
  if (name == "zero") return Value::nat_v(0);
  if (name == "empty") return Value::seq_v({}, ty.elem());
  auto v = std::make_shared<Value>();
  v->kind = Value::Kind::Prim;
  v->prim = name;
  v->prim_type = ty;
  return v;
}

ValuePtr run_prim(const std::string& name, const FinType& ty,
                  const std::vector<ValuePtr>& as, Fuel& fuel) {
  auto nat_arg = [&](size_t i) -> const Nat& {
    if (as[i]->kind != Value::Kind::Nat)
      throw TypeMismatch("primitive '" + name + "' expects a natural");
    return as[i]->nat;
  };
  if (name == "succ") return Value::nat_v(nat_arg(0) + 1);
  if (name == "add") return Value::nat_v(nat_arg(0) + nat_arg(1));
  if (name == "mul") return Value::nat_v(nat_arg(0) * nat_arg(1));
  if (name == "monus") {
    const Nat &a = nat_arg(0), &b = nat_arg(1);
    return Value::nat_v(a > b ? a - b : Nat(0));
  }
  if (name == "le") return Value::nat_v(nat_arg(0) <= nat_arg(1) ? 1 : 0);
  if (name == "max") {
    if (as[0]->kind != Value::Kind::Seq)
      throw TypeMismatch("max expects a sequence");
    Nat m = 0;  // empty sequence yields 0
    for (const auto& x : as[0]->seq) {
      if (x->kind != Value::Kind::Nat)
        throw TypeMismatch("max expects naturals");
      if (x->nat > m) m = x->nat;
    }
    return Value::nat_v(m);
  }
  if (name == "len") {
    if (as[0]->kind != Value::Kind::Seq)
      throw TypeMismatch("len expects a sequence");
    return Value::nat_v(static_cast<unsigned long>(as[0]->seq.size()));
  }
  if (name == "append") {
    if (as[0]->kind != Value::Kind::Seq || as[1]->kind != Value::Kind::Seq)
      throw TypeMismatch("append expects sequences");
    std::vector<ValuePtr> xs = as[0]->seq;
    xs.insert(xs.end(), as[1]->seq.begin(), as[1]->seq.end());
    return Value::seq_v(std::move(xs), as[0]->elem_type);
  }
  if (name == "cons") {
    if (as[1]->kind != Value::Kind::Seq)
      throw TypeMismatch("cons expects a sequence");
    std::vector<ValuePtr> xs;
    xs.reserve(as[1]->seq.size() + 1);
    xs.push_back(as[0]);
    xs.insert(xs.end(), as[1]->seq.begin(), as[1]->seq.end());
    return Value::seq_v(std::move(xs), as[1]->elem_type);
  }
  if (name == "index") {
    if (as[0]->kind != Value::Kind::Seq)
      throw TypeMismatch("index expects a sequence");
    const Nat& i = nat_arg(1);
    if (i < Nat(as[0]->seq.size()))
      return as[0]->seq[static_cast<size_t>(i)];
    // Out of range reads yield the canonical inhabitant; keeps the
    // evaluator total.
    return canonical_value(as[0]->elem_type);
  }
  if (name == "rec") {
    // rec n b s:  r(0)=b, r(k+1)=s(k, r(k)).
    const Nat& n = nat_arg(0);
    ValuePtr r = as[1];
    for (Nat k = 0; k < n; ++k) {
      fuel.tick();
      r = apply_value(apply_value(as[2], Value::nat_v(k), fuel), r, fuel);
    }
    return r;
  }
  throw UnknownConstant(name);
}

}  // namespace

ValuePtr apply_value(const ValuePtr& f, const ValuePtr& arg, Fuel& fuel) {
  fuel.tick();
  switch (f->kind) {
    case Value::Kind::Closure: {
      auto env2 = std::make_shared<std::vector<ValuePtr>>(*f->env);
      env2->push_back(arg);
      std::vector<ValuePtr> env = *env2;
      return evaluate(f->lam->body, fuel, env);
    }
    case Value::Kind::Prim: {
      auto v = std::make_shared<Value>(*f);
      v->prim_args.push_back(arg);
      if (static_cast<int>(v->prim_args.size()) == prim_arity(v->prim))
        return run_prim(v->prim, v->prim_type, v->prim_args, fuel);
      return v;
    }
    case Value::Kind::Native:
      return f->native(arg);
    default:
      throw TypeMismatch("applied a non-function value");
  }
}

ValuePtr apply_value(const ValuePtr& f, const ValuePtr& arg) {
  Fuel fuel;
  return apply_value(f, arg, fuel);
}

ValuePtr evaluate(const TermPtr& t, Fuel& fuel,
                  const std::vector<ValuePtr>& env) {
  fuel.tick();
  switch (t->kind) {
    case Term::Kind::Var: {
      int pos = static_cast<int>(env.size()) - 1 - t->index;
      if (pos < 0) throw UnboundVariable("#" + std::to_string(t->index));
      return env[pos];
    }
    case Term::Kind::Param:
      throw UnboundVariable("parameter '" + t->name + "' in evaluation");
    case Term::Kind::Const:
      return prim_value(t->name, t->type);
    case Term::Kind::Lit:
      return Value::nat_v(t->nat);
    case Term::Kind::Lam: {
      auto v = std::make_shared<Value>();
      v->kind = Value::Kind::Closure;
      v->lam = t;
      v->env = std::make_shared<const std::vector<ValuePtr>>(env);
      return v;
    }
    case Term::Kind::App: {
      ValuePtr f = evaluate(t->fn, fuel, env);
      ValuePtr a = evaluate(t->arg, fuel, env);
      return apply_value(f, a, fuel);
    }
  }
  throw TypeMismatch("malformed term");
}

ValuePtr evaluate(const TermPtr& t, long long fuel) {
  Fuel f{fuel};
  return evaluate(t, f, {});
}

Nat nat_of(const ValuePtr& v) {
  if (v->kind != Value::Kind::Nat)
    throw TypeMismatch("expected a natural value");
  return v->nat;
}

long long ll_of(const ValuePtr& v) {
  return static_cast<long long>(nat_of(v));
}

}  // namespace nsx
