#include "nsx/script.hpp"

#include <fstream>
#include <sstream>

#include "nsx/error.hpp"

namespace nsx {

namespace {

Mono parse_mono(const std::string& s) {
  if (s == "up") return Mono::Up;
  if (s == "down") return Mono::Down;
  throw SyntaxError(0, "monotone direction must be 'up' or 'down'");
}

ScriptStep parse_step(const Sexpr& e) {
  if (e.size() < 2 || !e[1].is_atom)
    throw SyntaxError(e.pos, "(step rule-name args...)");
  ScriptStep st;
  st.rule = e[1].atom;
  for (size_t i = 2; i < e.size(); ++i) {
    const Sexpr& a = e[i];
    if (a.is_atom) {
      st.vars.push_back(a.atom);
      continue;
    }
    const std::string h = a.head();
    if (h == "rel" && a.size() == 2) {
      st.rel = a[1].atom;
    } else if (h == "as") {
      for (size_t j = 1; j < a.size(); ++j) st.as_names.push_back(a[j].atom);
    } else if (h == "sampled") {
      st.sampled = true;
    } else if (h == "fn" && a.size() == 2) {
      st.fn = a[1];
    } else if (h == "bound" && a.size() == 2) {
      st.stable_bound = a[1];
    } else {
      throw SyntaxError(a.pos, "unknown step argument '" + h + "'");
    }
  }
  return st;
}

}  // namespace

ProofScript parse_script(const Sexpr& e) {
  if (e.head() != "script" || e.size() < 2 || !e[1].is_atom)
    throw SyntaxError(e.pos, "(script name ...)");
  ProofScript s;
  s.name = e[1].atom;
  s.rels = RelTable::builtins();

  // First pass: parameters and relations (needed to parse formulas).
  for (size_t i = 2; i < e.size(); ++i) {
    const Sexpr& sec = e[i];
    const std::string h = sec.head();
    if (h == "param") {
      if (sec.size() != 3) throw SyntaxError(sec.pos, "(param name type)");
      s.params[sec[1].atom] = FinType::from_sexpr(sec[2]);
    } else if (h == "relation") {
      if (sec.size() < 3) throw SyntaxError(sec.pos, "(relation name (types...) ...)");
      RelSig sig;
      for (const auto& t : sec[2].items) sig.argtypes.push_back(FinType::from_sexpr(t));
      for (size_t j = 3; j < sec.size(); ++j) {
        if (sec[j].head() == "monotone" && sec[j].size() == 3)
          sig.mono[std::stoi(sec[j][1].atom)] = parse_mono(sec[j][2].atom);
        else
          throw SyntaxError(sec[j].pos, "unknown relation attribute");
      }
      s.rels.rels[sec[1].atom] = std::move(sig);
    } else if (h == "system") {
      if (sec.size() != 2) throw SyntaxError(sec.pos, "(system P|P0|H)");
      s.system = sec[1].atom;
      if (s.system != "P" && s.system != "P0" && s.system != "H")
        throw SyntaxError(sec[1].pos, "system must be P, P0 or H");
    } else if (h == "dyadic-scale") {
      s.dyadic_scale = std::stoll(sec[1].atom);
    }
  }

  // Second pass: tracks, combines, goal.
  for (size_t i = 2; i < e.size(); ++i) {
    const Sexpr& sec = e[i];
    const std::string h = sec.head();
    if (h == "track") {
      if (sec.size() < 3 || !sec[1].is_atom)
        throw SyntaxError(sec.pos, "(track name (assume f) ...)");
      Track t;
      t.name = sec[1].atom;
      for (size_t j = 2; j < sec.size(); ++j) {
        const Sexpr& item = sec[j];
        const std::string ih = item.head();
        MetaSupply metas;
        std::vector<std::pair<std::string, FinType>> scope;
        if (ih == "assume") {
          if (item.size() != 2) throw SyntaxError(item.pos, "(assume formula)");
          t.assume = parse_formula(item[1], s.params, metas, scope);
        } else if (ih == "witness") {
          if (item.size() != 3)
            throw SyntaxError(item.pos, "(witness var term)");
          ScriptStep w;
          w.rule = "witness";
          w.vars.push_back(item[1].atom);
          w.fn = item[2];
          t.steps.push_back(std::move(w));
        } else if (ih == "step") {
          t.steps.push_back(parse_step(item));
        } else {
          throw SyntaxError(item.pos, "unknown track item '" + ih + "'");
        }
      }
      if (!t.assume) throw SyntaxError(sec.pos, "track lacks an (assume ...)");
      s.tracks.push_back(std::move(t));
    } else if (h == "combine") {
      if (sec.size() < 3 || sec[1].atom != "nf-mp")
        throw SyntaxError(sec.pos, "(combine nf-mp name ...)");
      CombineSpec c;
      c.name = sec[2].atom;
      for (size_t j = 3; j < sec.size(); ++j) {
        const Sexpr& item = sec[j];
        const std::string ih = item.head();
        if (ih == "antecedents") {
          for (size_t k = 1; k < item.size(); ++k)
            c.antecedents.push_back(item[k].atom);
        } else if (ih == "consequent") {
          c.consequent = item[1].atom;
        } else if (ih == "internal") {
          InternalParam ip;
          ip.name = item[1].atom;
          ip.type = FinType::from_sexpr(item[2]);
          if (item.size() > 3 && item[3].head() == "guard") {
            MetaSupply metas;
            std::vector<std::pair<std::string, FinType>> scope;
            ParamEnv env = s.params;
            env[ip.name] = ip.type;
            ip.guard = parse_formula(item[3][1], env, metas, scope);
          }
          c.internals.push_back(std::move(ip));
        } else if (ih == "collapse") {
          // (collapse var max)
          c.modes[item[1].atom] = item[2].atom;
        } else if (ih == "slacken") {
          for (size_t k = 1; k < item.size(); ++k)
            c.modes[item[k].atom] = "slacken";
        } else if (ih == "keep") {
          for (size_t k = 1; k < item.size(); ++k)
            c.modes[item[k].atom] = "keep";
        } else if (ih == "herbrand") {
          c.herb_mode = item[1].atom;
          if (c.herb_mode != "unified-max" && c.herb_mode != "keep-tuple")
            throw SyntaxError(item.pos,
                              "herbrand mode must be unified-max or keep-tuple");
        } else if (ih == "bridge") {
          for (size_t k = 1; k < item.size(); ++k) {
            const Sexpr& b = item[k];
            if (b.is_atom || b.size() != 2 || !b[0].is_atom)
              throw SyntaxError(b.pos, "(bridge (var term)...)");
            c.bridge.emplace_back(b[0].atom, b[1]);
          }
        } else {
          throw SyntaxError(item.pos, "unknown combine item '" + ih + "'");
        }
      }
      if (c.antecedents.empty() || c.consequent.empty())
        throw SyntaxError(sec.pos, "combine needs antecedents and a consequent");
      s.combines.push_back(std::move(c));
    } else if (h == "goal") {
      if (sec.size() != 3)
        throw SyntaxError(sec.pos, "(goal track-name formula)");
      s.goal_track = sec[1].atom;
      MetaSupply metas;
      std::vector<std::pair<std::string, FinType>> scope;
      s.goal = parse_formula(sec[2], s.params, metas, scope);
    } else if (h == "param" || h == "relation" || h == "system" ||
               h == "dyadic-scale") {
      // handled in the first pass
    } else {
      throw SyntaxError(sec.pos, "unknown script section '" + h + "'");
    }
  }
  if (s.goal_track.empty())
    throw SyntaxError(e.pos, "script lacks a (goal ...) section");
  return s;
}

std::vector<ProofScript> parse_script_text(const std::string& text) {
  std::vector<ProofScript> out;
  for (const Sexpr& e : parse_sexprs(text)) out.push_back(parse_script(e));
  return out;
}

std::vector<ProofScript> load_scripts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScriptError("cannot open script file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto scripts = parse_script_text(ss.str());
  for (auto& s : scripts) s.source_path = path;
  return scripts;
}

}  // namespace nsx
