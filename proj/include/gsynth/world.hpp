#ifndef GSYNTH_WORLD_HPP
#define GSYNTH_WORLD_HPP

#include <map>
#include <string>
#include <vector>

#include "formula.hpp"

namespace gsynth {

// Finite surrogate for the standard-name universe: the objects named in the
// input plus a configurable number of fresh anonymous objects.
struct Universe {
  std::vector<std::string> objects;

  static Universe with_padding(std::vector<std::string> named, int padding) {
    Universe u{std::move(named)};
    for (int i = 0; i < padding; ++i) u.objects.push_back("_pad" + std::to_string(i));
    return u;
  }
};

// A ground fluent atom key, e.g. "dirtyDish(d1,r1)".
inline std::string ground_atom_key(const std::string& pred, const std::vector<std::string>& args) {
  std::string s = pred;
  s += '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += args[i];
  }
  s += ')';
  return s;
}

// Explicit initial-situation slice of a world: a total valuation of the
// ground atoms over a finite universe.
struct WorldModel {
  Universe universe;
  std::map<std::string, bool> valuation;

  bool holds(const std::string& pred, const std::vector<std::string>& args) const {
    auto it = valuation.find(ground_atom_key(pred, args));
    return it != valuation.end() && it->second;
  }
};

struct Trace {
  std::vector<ActionTerm> actions;

  size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  Trace prefix(size_t i) const { return Trace{{actions.begin(), actions.begin() + i}}; }
  Trace suffix(size_t i) const {
    if (i >= actions.size()) return Trace{};
    return Trace{{actions.begin() + i, actions.end()}};
  }
  Trace append(const ActionTerm& a) const {
    Trace t = *this;
    t.actions.push_back(a);
    return t;
  }
  std::string str() const {
    std::string s = "[";
    for (size_t i = 0; i < actions.size(); ++i) {
      if (i) s += " ";
      s += actions[i].str();
    }
    return s + "]";
  }
};

// Evaluate a sentence directly against a world valuation; quantifiers range
// over the world's finite universe.
inline bool eval_formula(const WorldModel& w, const FormulaPtr& f) {
  switch (f->kind) {
    case FKind::True:
      return true;
    case FKind::False:
      return false;
    case FKind::Atom: {
      std::vector<std::string> args;
      for (const auto& t : f->terms) {
        if (t.is_var) throw InputError("free variable in evaluated formula: " + t.text);
        args.push_back(t.text);
      }
      return w.holds(f->pred, args);
    }
    case FKind::Eq:
      if (f->terms[0].is_var || f->terms[1].is_var)
        throw InputError("free variable in evaluated equality");
      return f->terms[0].text == f->terms[1].text;
    case FKind::Not:
      return !eval_formula(w, f->kids[0]);
    case FKind::And:
      for (const auto& k : f->kids)
        if (!eval_formula(w, k)) return false;
      return true;
    case FKind::Or:
      for (const auto& k : f->kids)
        if (eval_formula(w, k)) return true;
      return false;
    case FKind::Forall:
      for (const auto& n : w.universe.objects)
        if (!eval_formula(w, substitute(f->kids[0], f->var, n))) return false;
      return true;
    case FKind::Exists:
      for (const auto& n : w.universe.objects)
        if (eval_formula(w, substitute(f->kids[0], f->var, n))) return true;
      return false;
    case FKind::CountLeq:
    case FKind::CountGeq: {
      int hits = 0;
      for (const auto& n : w.universe.objects)
        if (eval_formula(w, substitute(f->kids[0], f->var, n))) ++hits;
      return f->kind == FKind::CountLeq ? hits <= f->count : hits >= f->count;
    }
  }
  return false;
}

}  // namespace gsynth

#endif
