#ifndef GSYNTH_LTLF_HPP
#define GSYNTH_LTLF_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "formula.hpp"
#include "world.hpp"

namespace gsynth {

enum class TKind {
  Fluent,  // embedded C2-fluent sentence
  Tail,
  True,
  False,
  Not,
  And,
  Or,
  Next,
  WeakNext,
  Until,
  Release,
};

struct Temporal;
using TemporalPtr = std::shared_ptr<const Temporal>;

// LTLf formula over fluent sentences, plus the Tail end-marker.
struct Temporal {
  TKind kind;
  FormulaPtr fluent;  // Fluent only; stored canonicalized
  std::vector<TemporalPtr> kids;
  mutable std::string key_cache;

  const std::string& key() const {
    if (!key_cache.empty()) return key_cache;
    std::string s;
    switch (kind) {
      case TKind::Fluent: s = fluent->key(); break;
      case TKind::Tail: s = "Tail"; break;
      case TKind::True: s = "tt"; break;
      case TKind::False: s = "ff"; break;
      case TKind::Not: s = "(! " + kids[0]->key() + ")"; break;
      case TKind::And:
      case TKind::Or: {
        s = kind == TKind::And ? "(& " : "(| ";
        s += kids[0]->key() + " " + kids[1]->key() + ")";
        break;
      }
      case TKind::Next: s = "(X " + kids[0]->key() + ")"; break;
      case TKind::WeakNext: s = "(WX " + kids[0]->key() + ")"; break;
      case TKind::Until: s = "(U " + kids[0]->key() + " " + kids[1]->key() + ")"; break;
      case TKind::Release: s = "(R " + kids[0]->key() + " " + kids[1]->key() + ")"; break;
    }
    key_cache = std::move(s);
    return key_cache;
  }
};

inline TemporalPtr t_leaf(TKind k) {
  auto t = std::make_shared<Temporal>();
  t->kind = k;
  return t;
}
inline TemporalPtr t_tail() { return t_leaf(TKind::Tail); }
inline TemporalPtr t_true() { return t_leaf(TKind::True); }
inline TemporalPtr t_false() { return t_leaf(TKind::False); }
inline TemporalPtr t_un(TKind k, TemporalPtr a) {
  auto t = std::make_shared<Temporal>();
  t->kind = k;
  t->kids = {std::move(a)};
  return t;
}
inline TemporalPtr t_bin(TKind k, TemporalPtr a, TemporalPtr b) {
  auto t = std::make_shared<Temporal>();
  t->kind = k;
  t->kids = {std::move(a), std::move(b)};
  return t;
}
inline TemporalPtr t_not(TemporalPtr a) { return t_un(TKind::Not, std::move(a)); }
// A canonical negation floats up to the temporal level so that phi and
// not(phi) are complementary literals over the same propositional atom.
inline TemporalPtr t_fluent(FormulaPtr f) {
  FormulaPtr c = canonicalize(std::move(f));
  if (c->kind == FKind::True) return t_true();
  if (c->kind == FKind::False) return t_false();
  bool negated = c->kind == FKind::Not;
  if (negated) c = c->kids[0];
  auto t = std::make_shared<Temporal>();
  t->kind = TKind::Fluent;
  t->fluent = std::move(c);
  return negated ? t_not(t) : t;
}
inline TemporalPtr t_and(TemporalPtr a, TemporalPtr b) { return t_bin(TKind::And, std::move(a), std::move(b)); }
inline TemporalPtr t_or(TemporalPtr a, TemporalPtr b) { return t_bin(TKind::Or, std::move(a), std::move(b)); }
inline TemporalPtr t_next(TemporalPtr a) { return t_un(TKind::Next, std::move(a)); }
inline TemporalPtr t_wnext(TemporalPtr a) { return t_un(TKind::WeakNext, std::move(a)); }
inline TemporalPtr t_until(TemporalPtr a, TemporalPtr b) { return t_bin(TKind::Until, std::move(a), std::move(b)); }
inline TemporalPtr t_release(TemporalPtr a, TemporalPtr b) { return t_bin(TKind::Release, std::move(a), std::move(b)); }
inline TemporalPtr t_finally(TemporalPtr a) { return t_until(t_true(), std::move(a)); }
inline TemporalPtr t_globally(TemporalPtr a) { return t_release(t_false(), std::move(a)); }

// Negation pushed down to fluent sentences and Tail, using the duals.
inline TemporalPtr t_nnf(const TemporalPtr& f, bool neg = false) {
  switch (f->kind) {
    case TKind::Fluent:
      return neg ? t_fluent(f_not(f->fluent)) : f;
    case TKind::Tail:
      return neg ? t_not(f) : f;
    case TKind::True:
      return neg ? t_false() : t_true();
    case TKind::False:
      return neg ? t_true() : t_false();
    case TKind::Not:
      return t_nnf(f->kids[0], !neg);
    case TKind::And:
    case TKind::Or: {
      TKind k = (f->kind == TKind::And) != neg ? TKind::And : TKind::Or;
      return t_bin(k, t_nnf(f->kids[0], neg), t_nnf(f->kids[1], neg));
    }
    case TKind::Next:
      return t_un(neg ? TKind::WeakNext : TKind::Next, t_nnf(f->kids[0], neg));
    case TKind::WeakNext:
      return t_un(neg ? TKind::Next : TKind::WeakNext, t_nnf(f->kids[0], neg));
    case TKind::Until:
      return t_bin(neg ? TKind::Release : TKind::Until, t_nnf(f->kids[0], neg),
                   t_nnf(f->kids[1], neg));
    case TKind::Release:
      return t_bin(neg ? TKind::Until : TKind::Release, t_nnf(f->kids[0], neg),
                   t_nnf(f->kids[1], neg));
  }
  return f;
}

inline bool t_is_nnf(const TemporalPtr& f) {
  if (f->kind == TKind::Not)
    return f->kids[0]->kind == TKind::Fluent || f->kids[0]->kind == TKind::Tail;
  for (const auto& k : f->kids)
    if (!t_is_nnf(k)) return false;
  return true;
}

namespace detail {

inline TemporalPtr tnft(const TemporalPtr& f) {
  switch (f->kind) {
    case TKind::True:
    case TKind::False:
    case TKind::Fluent:
    case TKind::Tail:
      return f;
    case TKind::Not:
      return f;  // NNF literal
    case TKind::Next:
      return t_and(t_not(t_tail()), t_next(tnft(f->kids[0])));
    case TKind::WeakNext:
      return t_or(t_tail(), t_next(tnft(f->kids[0])));
    case TKind::And:
      return t_and(tnft(f->kids[0]), tnft(f->kids[1]));
    case TKind::Or:
      return t_or(tnft(f->kids[0]), tnft(f->kids[1]));
    case TKind::Until:
      return t_until(t_and(t_not(t_tail()), tnft(f->kids[0])), tnft(f->kids[1]));
    case TKind::Release:
      return t_release(t_or(t_tail(), tnft(f->kids[0])), tnft(f->kids[1]));
  }
  return f;
}

}  // namespace detail

// Tail normal form: marks the last state of satisfying traces.
inline TemporalPtr tnf(const TemporalPtr& f) {
  if (!t_is_nnf(f)) throw InputError("tnf requires negation normal form");
  return t_and(detail::tnft(f), t_finally(t_tail()));
}

// neXt normal form: the only outermost temporal connective is Next.
//
// The Release expansion uses strong Next, which is only truth-preserving on
// Tail-normalized input (there the left operand carries a Tail disjunct that
// discharges the Release at the end of the trace). Apply tnf first.
inline TemporalPtr xnf(const TemporalPtr& f) {
  switch (f->kind) {
    case TKind::True:
    case TKind::False:
    case TKind::Fluent:
    case TKind::Tail:
    case TKind::Not:
    case TKind::Next:
      return f;
    case TKind::WeakNext:
      // admitted as the dual of Next: WX p == Tail | X p
      return t_or(t_tail(), t_next(f->kids[0]));
    case TKind::And:
      return t_and(xnf(f->kids[0]), xnf(f->kids[1]));
    case TKind::Or:
      return t_or(xnf(f->kids[0]), xnf(f->kids[1]));
    case TKind::Until:
      return t_or(xnf(f->kids[1]), t_and(xnf(f->kids[0]), t_next(f)));
    case TKind::Release:
      return t_and(xnf(f->kids[1]), t_or(xnf(f->kids[0]), t_next(f)));
  }
  return f;
}

inline void propositional_atoms_into(const TemporalPtr& f, std::map<std::string, TemporalPtr>& out) {
  switch (f->kind) {
    case TKind::Fluent:
    case TKind::Tail:
    case TKind::Next:
    case TKind::Until:
    case TKind::Release:
    case TKind::WeakNext:
      out.emplace(f->key(), f);
      break;
    case TKind::Not:
      propositional_atoms_into(f->kids[0], out);
      break;
    case TKind::And:
    case TKind::Or:
      propositional_atoms_into(f->kids[0], out);
      propositional_atoms_into(f->kids[1], out);
      break;
    default:
      break;
  }
}

// Subformulas with a temporal operator outermost, fluent sentences, and Tail,
// treated as propositional atoms.
inline std::vector<TemporalPtr> propositional_atoms(const TemporalPtr& f) {
  std::map<std::string, TemporalPtr> m;
  propositional_atoms_into(f, m);
  std::vector<TemporalPtr> out;
  for (auto& [k, v] : m) out.push_back(v);
  return out;
}

// A consistent set of signed propositional atoms, with the L/X/T views.
struct PropAssignment {
  // atom key -> (atom, sign)
  std::map<std::string, std::pair<TemporalPtr, bool>> literals;

  bool insert(const TemporalPtr& atom, bool sign) {
    auto it = literals.find(atom->key());
    if (it != literals.end()) return it->second.second == sign;
    literals.emplace(atom->key(), std::make_pair(atom, sign));
    return true;
  }
  bool subset_of(const PropAssignment& o) const {
    for (const auto& [k, ls] : literals) {
      auto it = o.literals.find(k);
      if (it == o.literals.end() || it->second.second != ls.second) return false;
    }
    return true;
  }
  bool operator==(const PropAssignment& o) const {
    return key() == o.key();
  }
  std::string key() const {
    std::string s;
    for (const auto& [k, ls] : literals) s += (ls.second ? "+" : "-") + k + ";";
    return s;
  }

  // Fluent literals, as fluent formulas (negative literals become negations).
  std::vector<FormulaPtr> L() const {
    std::vector<FormulaPtr> out;
    for (const auto& [k, ls] : literals)
      if (ls.first->kind == TKind::Fluent)
        out.push_back(ls.second ? ls.first->fluent : canonicalize(f_not(ls.first->fluent)));
    return out;
  }
  // Formulas under Next.
  std::vector<TemporalPtr> X() const {
    std::vector<TemporalPtr> out;
    for (const auto& [k, ls] : literals)
      if (ls.first->kind == TKind::Next && ls.second) out.push_back(ls.first->kids[0]);
    return out;
  }
  bool T() const {
    auto it = literals.find("Tail");
    return it != literals.end() && it->second.second;
  }
};

namespace detail {

enum class TV { T, F, U };

inline TV eval3(const TemporalPtr& f, const PropAssignment& p, bool neg = false) {
  switch (f->kind) {
    case TKind::True:
      return neg ? TV::F : TV::T;
    case TKind::False:
      return neg ? TV::T : TV::F;
    case TKind::Not:
      return eval3(f->kids[0], p, !neg);
    case TKind::And:
    case TKind::Or: {
      bool conj = (f->kind == TKind::And) != neg;
      TV a = eval3(f->kids[0], p, neg);
      TV b = eval3(f->kids[1], p, neg);
      if (conj) {
        if (a == TV::F || b == TV::F) return TV::F;
        if (a == TV::T && b == TV::T) return TV::T;
        return TV::U;
      }
      if (a == TV::T || b == TV::T) return TV::T;
      if (a == TV::F && b == TV::F) return TV::F;
      return TV::U;
    }
    default: {
      auto it = p.literals.find(f->key());
      if (it == p.literals.end()) return TV::U;
      bool v = it->second.second != neg;
      return v ? TV::T : TV::F;
    }
  }
}

inline void enum_sat(const TemporalPtr& f, bool neg, const PropAssignment& cur,
                     std::vector<PropAssignment>& out) {
  switch (f->kind) {
    case TKind::True:
      if (!neg) out.push_back(cur);
      return;
    case TKind::False:
      if (neg) out.push_back(cur);
      return;
    case TKind::Not:
      enum_sat(f->kids[0], !neg, cur, out);
      return;
    case TKind::And:
    case TKind::Or: {
      bool conj = (f->kind == TKind::And) != neg;
      if (conj) {
        std::vector<PropAssignment> left;
        enum_sat(f->kids[0], neg, cur, left);
        for (const auto& l : left) enum_sat(f->kids[1], neg, l, out);
      } else {
        enum_sat(f->kids[0], neg, cur, out);
        enum_sat(f->kids[1], neg, cur, out);
      }
      return;
    }
    default: {
      PropAssignment next = cur;
      if (next.insert(f, !neg)) out.push_back(std::move(next));
      return;
    }
  }
}

}  // namespace detail

// All minimal satisfying partial assignments of f^p: every total extension
// satisfies f^p, and no literal can be dropped.
inline std::vector<PropAssignment> enumerate_assignments(const TemporalPtr& f) {
  std::vector<PropAssignment> raw;
  detail::enum_sat(f, false, {}, raw);
  // minimize each assignment by greedy literal dropping
  for (auto& p : raw) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [k, ls] : p.literals) {
        PropAssignment q = p;
        q.literals.erase(k);
        if (detail::eval3(f, q) == detail::TV::T) {
          p = std::move(q);
          changed = true;
          break;
        }
      }
    }
  }
  // dedup and drop supersets
  std::vector<PropAssignment> out;
  for (const auto& p : raw) {
    bool dominated = false;
    for (const auto& q : raw)
      if (!(q == p) && q.subset_of(p)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    bool dup = false;
    for (const auto& q : out)
      if (q == p) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  return out;
}

// Truth of a temporal formula over a sequence of world snapshots. states[0]
// is the world after the already-executed prefix; the remaining trace spans
// states[pos..]. Tail holds exactly at the last snapshot.
inline bool eval_trace(const std::vector<WorldModel>& states, size_t pos, const TemporalPtr& f) {
  switch (f->kind) {
    case TKind::Fluent:
      return eval_formula(states[pos], f->fluent);
    case TKind::Tail:
      return pos + 1 == states.size();
    case TKind::True:
      return true;
    case TKind::False:
      return false;
    case TKind::Not:
      return !eval_trace(states, pos, f->kids[0]);
    case TKind::And:
      return eval_trace(states, pos, f->kids[0]) && eval_trace(states, pos, f->kids[1]);
    case TKind::Or:
      return eval_trace(states, pos, f->kids[0]) || eval_trace(states, pos, f->kids[1]);
    case TKind::Next:
      return pos + 1 < states.size() && eval_trace(states, pos + 1, f->kids[0]);
    case TKind::WeakNext:
      return pos + 1 >= states.size() || eval_trace(states, pos + 1, f->kids[0]);
    case TKind::Until: {
      for (size_t k = pos; k < states.size(); ++k) {
        if (eval_trace(states, k, f->kids[1])) {
          bool ok = true;
          for (size_t i = pos; i < k; ++i)
            if (!eval_trace(states, i, f->kids[0])) {
              ok = false;
              break;
            }
          if (ok) return true;
        }
      }
      return false;
    }
    case TKind::Release: {
      // dual of Until
      for (size_t k = pos; k < states.size(); ++k) {
        if (!eval_trace(states, k, f->kids[1])) {
          bool released = false;
          for (size_t i = pos; i < k; ++i)
            if (eval_trace(states, i, f->kids[0])) {
              released = true;
              break;
            }
          if (!released) return false;
        }
      }
      return true;
    }
  }
  return false;
}

}  // namespace gsynth

#endif
