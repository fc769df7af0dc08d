#include "nsx/ground.hpp"

#include "nsx/error.hpp"
#include "nsx/parser.hpp"

namespace nsx {

namespace {

bool is_standard(const ValuePtr& v, const GroundModel& m) {
  switch (v->kind) {
    case Value::Kind::Nat:
      return v->nat <= Nat(m.standard_cut);
    case Value::Kind::Seq: {
      for (const auto& x : v->seq)
        if (!is_standard(x, m)) return false;
      return true;
    }
    default:
      throw UnsupportedType("st on a functional value in the ground model");
  }
}

}  // namespace

std::vector<ValuePtr> enumerate_domain(const FinType& ty,
                                       const GroundModel& model) {
  if (ty.is_nat()) {
    std::vector<ValuePtr> out;
    for (long long i = 0; i <= model.nat_max; ++i) out.push_back(Value::nat_v(i));
    return out;
  }
  if (ty.is_seq() && ty.elem().is_nat()) {
    std::vector<ValuePtr> out{Value::seq_v({}, FinType::nat())};
    std::vector<std::vector<ValuePtr>> prev{{}};
    for (int len = 1; len <= model.seq_max; ++len) {
      std::vector<std::vector<ValuePtr>> cur;
      for (const auto& p : prev) {
        for (long long i = 0; i <= model.nat_max; ++i) {
          auto xs = p;
          xs.push_back(Value::nat_v(i));
          out.push_back(Value::seq_v(xs, FinType::nat()));
          cur.push_back(std::move(xs));
        }
      }
      prev = std::move(cur);
    }
    return out;
  }
  throw UnsupportedType("ground enumeration over " + ty.to_string());
}

bool eval_ground(const FormulaPtr& f, const GroundModel& model,
                 std::vector<ValuePtr>& env) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      Fuel fuel{model.fuel};
      std::vector<ValuePtr> vals;
      for (const auto& t : f->args) vals.push_back(evaluate(t, fuel, env));
      const std::string& r = f->rel;
      if (r == kRelEq0 || r == kRelEq) {
        if (vals.size() != 2) throw TypeMismatch(r + " arity");
        return value_equal(vals[0], vals[1]);
      }
      if (r == kRelLe0) return nat_of(vals[0]) <= nat_of(vals[1]);
      if (r == kRelLt0) return nat_of(vals[0]) < nat_of(vals[1]);
      if (r == kRelInSeq) {
        if (vals[1]->kind != Value::Kind::Seq)
          throw TypeMismatch("in-seq expects a sequence");
        for (const auto& x : vals[1]->seq)
          if (value_equal(x, vals[0])) return true;
        return false;
      }
      throw UnsupportedType("ground evaluation of relation '" + r + "'");
    }
    case Formula::Kind::St: {
      Fuel fuel{model.fuel};
      return is_standard(evaluate(f->term, fuel, env), model);
    }
    case Formula::Kind::InOmega: {
      Fuel fuel{model.fuel};
      return !is_standard(evaluate(f->term, fuel, env), model);
    }
    case Formula::Kind::ApproxEq:
      throw UnsupportedType("ground evaluation of approximate equality");
    case Formula::Kind::Not:
      return !eval_ground(f->a, model, env);
    case Formula::Kind::And:
      return eval_ground(f->a, model, env) && eval_ground(f->b, model, env);
    case Formula::Kind::Or:
      return eval_ground(f->a, model, env) || eval_ground(f->b, model, env);
    case Formula::Kind::Implies:
      return !eval_ground(f->a, model, env) || eval_ground(f->b, model, env);
    case Formula::Kind::ForAll:
    case Formula::Kind::ForAllSt: {
      bool relativized = f->kind == Formula::Kind::ForAllSt;
      for (const auto& v : enumerate_domain(f->type, model)) {
        if (relativized && !is_standard(v, model)) continue;
        env.push_back(v);
        bool ok = eval_ground(f->a, model, env);
        env.pop_back();
        if (!ok) return false;
      }
      return true;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::ExistsSt: {
      bool relativized = f->kind == Formula::Kind::ExistsSt;
      for (const auto& v : enumerate_domain(f->type, model)) {
        if (relativized && !is_standard(v, model)) continue;
        env.push_back(v);
        bool ok = eval_ground(f->a, model, env);
        env.pop_back();
        if (ok) return true;
      }
      return false;
    }
  }
  return false;
}

bool eval_ground(const FormulaPtr& f, const GroundModel& model) {
  std::vector<ValuePtr> env;
  return eval_ground(f, model, env);
}

}  // namespace nsx
