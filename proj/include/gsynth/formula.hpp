#ifndef GSYNTH_FORMULA_HPP
#define GSYNTH_FORMULA_HPP

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsynth {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A ground action term, e.g. load(d1,r1). All arguments are object names.
struct ActionTerm {
  std::string fn;
  std::vector<std::string> args;

  std::string str() const {
    std::string s = fn;
    if (!args.empty()) {
      s += '(';
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ',';
        s += args[i];
      }
      s += ')';
    }
    return s;
  }
  bool operator==(const ActionTerm& o) const { return fn == o.fn && args == o.args; }
  bool operator<(const ActionTerm& o) const {
    if (fn != o.fn) return fn < o.fn;
    return args < o.args;
  }
};

// An object-sorted term: either a variable or a standard name.
struct Term {
  std::string text;
  bool is_var = false;

  static Term var(std::string v) { return Term{std::move(v), true}; }
  static Term name(std::string n) { return Term{std::move(n), false}; }
  bool operator==(const Term& o) const { return text == o.text && is_var == o.is_var; }
};

enum class FKind {
  True,
  False,
  Atom,
  Eq,
  Not,
  And,
  Or,
  Forall,
  Exists,
  CountLeq,  // at most `count` instances
  CountGeq,  // at least `count` instances
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable fluent-formula AST node.
struct Formula {
  FKind kind;
  std::string pred;          // Atom
  std::vector<Term> terms;   // Atom (0-2 args), Eq (exactly 2)
  std::string var;           // quantifiers
  int count = 0;             // CountLeq/CountGeq
  std::vector<FormulaPtr> kids;

  mutable std::string key_cache;

  // Canonical textual key; doubles as the printed form.
  const std::string& key() const {
    if (!key_cache.empty()) return key_cache;
    std::string s;
    switch (kind) {
      case FKind::True: s = "true"; break;
      case FKind::False: s = "false"; break;
      case FKind::Atom:
        s = "(" + pred;
        for (const auto& t : terms) s += " " + (t.is_var ? "?" + t.text : t.text);
        s += ")";
        break;
      case FKind::Eq:
        s = "(= " + (terms[0].is_var ? "?" + terms[0].text : terms[0].text) + " " +
            (terms[1].is_var ? "?" + terms[1].text : terms[1].text) + ")";
        break;
      case FKind::Not: s = "(not " + kids[0]->key() + ")"; break;
      case FKind::And:
      case FKind::Or: {
        s = kind == FKind::And ? "(and" : "(or";
        for (const auto& k : kids) s += " " + k->key();
        s += ")";
        break;
      }
      case FKind::Forall: s = "(forall " + var + " " + kids[0]->key() + ")"; break;
      case FKind::Exists: s = "(exists " + var + " " + kids[0]->key() + ")"; break;
      case FKind::CountLeq:
        s = "(at-most " + std::to_string(count) + " " + var + " " + kids[0]->key() + ")";
        break;
      case FKind::CountGeq:
        s = "(at-least " + std::to_string(count) + " " + var + " " + kids[0]->key() + ")";
        break;
    }
    key_cache = std::move(s);
    return key_cache;
  }
};

inline bool formula_eq(const FormulaPtr& a, const FormulaPtr& b) {
  return a == b || a->key() == b->key();
}

inline FormulaPtr f_true() {
  static FormulaPtr t = std::make_shared<Formula>(Formula{FKind::True});
  return t;
}
inline FormulaPtr f_false() {
  static FormulaPtr f = std::make_shared<Formula>(Formula{FKind::False});
  return f;
}
inline FormulaPtr f_atom(std::string pred, std::vector<Term> ts) {
  if (ts.size() > 2) throw InputError("fluent arity > 2: " + pred);
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Atom;
  f->pred = std::move(pred);
  f->terms = std::move(ts);
  return f;
}
inline FormulaPtr f_eq(Term a, Term b) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Eq;
  f->terms = {std::move(a), std::move(b)};
  return f;
}
inline FormulaPtr f_not(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Not;
  f->kids = {std::move(a)};
  return f;
}
inline FormulaPtr f_and(std::vector<FormulaPtr> ks) {
  if (ks.empty()) return f_true();
  if (ks.size() == 1) return ks[0];
  auto f = std::make_shared<Formula>();
  f->kind = FKind::And;
  f->kids = std::move(ks);
  return f;
}
inline FormulaPtr f_or(std::vector<FormulaPtr> ks) {
  if (ks.empty()) return f_false();
  if (ks.size() == 1) return ks[0];
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Or;
  f->kids = std::move(ks);
  return f;
}
inline FormulaPtr f_quant(FKind k, std::string var, FormulaPtr body, int count = 0) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var = std::move(var);
  f->count = count;
  f->kids = {std::move(body)};
  return f;
}
inline FormulaPtr f_forall(std::string v, FormulaPtr b) { return f_quant(FKind::Forall, std::move(v), std::move(b)); }
inline FormulaPtr f_exists(std::string v, FormulaPtr b) { return f_quant(FKind::Exists, std::move(v), std::move(b)); }
inline FormulaPtr f_at_most(int m, std::string v, FormulaPtr b) { return f_quant(FKind::CountLeq, std::move(v), std::move(b), m); }
inline FormulaPtr f_at_least(int m, std::string v, FormulaPtr b) { return f_quant(FKind::CountGeq, std::move(v), std::move(b), m); }
inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return f_or({f_not(std::move(a)), std::move(b)}); }
inline FormulaPtr f_iff(FormulaPtr a, FormulaPtr b) {
  return f_and({f_implies(a, b), f_implies(b, a)});
}

inline bool is_quant(FKind k) {
  return k == FKind::Forall || k == FKind::Exists || k == FKind::CountLeq || k == FKind::CountGeq;
}

inline void collect_free_vars(const FormulaPtr& f, std::set<std::string>& bound,
                              std::set<std::string>& out) {
  switch (f->kind) {
    case FKind::Atom:
    case FKind::Eq:
      for (const auto& t : f->terms)
        if (t.is_var && !bound.count(t.text)) out.insert(t.text);
      break;
    case FKind::Forall:
    case FKind::Exists:
    case FKind::CountLeq:
    case FKind::CountGeq: {
      bool was = bound.count(f->var) > 0;
      bound.insert(f->var);
      collect_free_vars(f->kids[0], bound, out);
      if (!was) bound.erase(f->var);
      break;
    }
    default:
      for (const auto& k : f->kids) collect_free_vars(k, bound, out);
  }
}

inline std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

inline bool is_sentence(const FormulaPtr& f) { return free_vars(f).empty(); }

// Simultaneous replacement of free occurrences of one variable by a name.
inline FormulaPtr substitute(const FormulaPtr& f, const std::string& x, const std::string& n) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
      return f;
    case FKind::Atom:
    case FKind::Eq: {
      bool hit = false;
      for (const auto& t : f->terms)
        if (t.is_var && t.text == x) hit = true;
      if (!hit) return f;
      auto g = std::make_shared<Formula>(*f);
      g->key_cache.clear();
      for (auto& t : g->terms)
        if (t.is_var && t.text == x) t = Term::name(n);
      return g;
    }
    case FKind::Not:
      return f_not(substitute(f->kids[0], x, n));
    case FKind::And:
    case FKind::Or: {
      std::vector<FormulaPtr> ks;
      ks.reserve(f->kids.size());
      for (const auto& k : f->kids) ks.push_back(substitute(k, x, n));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    default: {
      if (f->var == x) return f;  // bound occurrences untouched
      return f_quant(f->kind, f->var, substitute(f->kids[0], x, n), f->count);
    }
  }
}

// Substitute a variable by another variable (used when instantiating SSA patterns).
inline FormulaPtr substitute_var(const FormulaPtr& f, const std::string& x, const Term& t) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
      return f;
    case FKind::Atom:
    case FKind::Eq: {
      auto g = std::make_shared<Formula>(*f);
      g->key_cache.clear();
      for (auto& tm : g->terms)
        if (tm.is_var && tm.text == x) tm = t;
      return g;
    }
    case FKind::Not:
      return f_not(substitute_var(f->kids[0], x, t));
    case FKind::And:
    case FKind::Or: {
      std::vector<FormulaPtr> ks;
      for (const auto& k : f->kids) ks.push_back(substitute_var(k, x, t));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    default: {
      if (f->var == x) return f;
      return f_quant(f->kind, f->var, substitute_var(f->kids[0], x, t), f->count);
    }
  }
}

// Negation normal form. Counting quantifiers go through their duals:
// not at-most m == at-least m+1, not at-least m == at-most m-1.
inline FormulaPtr to_nnf(const FormulaPtr& f, bool neg = false) {
  switch (f->kind) {
    case FKind::True:
      return neg ? f_false() : f_true();
    case FKind::False:
      return neg ? f_true() : f_false();
    case FKind::Atom:
    case FKind::Eq:
      return neg ? f_not(f) : f;
    case FKind::Not:
      return to_nnf(f->kids[0], !neg);
    case FKind::And:
    case FKind::Or: {
      std::vector<FormulaPtr> ks;
      for (const auto& k : f->kids) ks.push_back(to_nnf(k, neg));
      bool conj = (f->kind == FKind::And) != neg;
      return conj ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::Forall:
      return f_quant(neg ? FKind::Exists : FKind::Forall, f->var, to_nnf(f->kids[0], neg));
    case FKind::Exists:
      return f_quant(neg ? FKind::Forall : FKind::Exists, f->var, to_nnf(f->kids[0], neg));
    case FKind::CountLeq:
      if (!neg) return f_quant(FKind::CountLeq, f->var, to_nnf(f->kids[0]), f->count);
      return f_quant(FKind::CountGeq, f->var, to_nnf(f->kids[0]), f->count + 1);
    case FKind::CountGeq:
      if (!neg) return f_quant(FKind::CountGeq, f->var, to_nnf(f->kids[0]), f->count);
      if (f->count == 0) return f_false();  // at-least 0 is vacuous
      return f_quant(FKind::CountLeq, f->var, to_nnf(f->kids[0]), f->count - 1);
  }
  return f;
}

// True iff the formula mentions at most two distinct variable symbols and
// all fluent arities are at most two. Action terms cannot occur by construction.
inline bool check_c2(const FormulaPtr& f) {
  std::set<std::string> vars;
  bool arity_ok = true;
  std::vector<const Formula*> stack{f.get()};
  while (!stack.empty()) {
    const Formula* g = stack.back();
    stack.pop_back();
    if (g->kind == FKind::Atom && g->terms.size() > 2) arity_ok = false;
    for (const auto& t : g->terms)
      if (t.is_var) vars.insert(t.text);
    if (is_quant(g->kind)) vars.insert(g->var);
    for (const auto& k : g->kids) stack.push_back(k.get());
  }
  return arity_ok && vars.size() <= 2;
}

namespace detail {

inline FormulaPtr canon(const FormulaPtr& f, std::map<std::string, std::string>& rename, int depth);

inline Term canon_term(const Term& t, const std::map<std::string, std::string>& rename) {
  if (t.is_var) {
    auto it = rename.find(t.text);
    if (it != rename.end()) return Term::var(it->second);
  }
  return t;
}

inline FormulaPtr canon_ac(FKind kind, const std::vector<FormulaPtr>& kids,
                           std::map<std::string, std::string>& rename, int depth) {
  const bool conj = kind == FKind::And;
  std::vector<FormulaPtr> flat;
  for (const auto& k : kids) {
    FormulaPtr c = canon(k, rename, depth);
    if (c->kind == kind) {
      for (const auto& g : c->kids) flat.push_back(g);
    } else if (c->kind == (conj ? FKind::True : FKind::False)) {
      continue;  // neutral element
    } else if (c->kind == (conj ? FKind::False : FKind::True)) {
      return conj ? f_false() : f_true();  // absorbing element
    } else {
      flat.push_back(c);
    }
  }
  std::sort(flat.begin(), flat.end(),
            [](const FormulaPtr& a, const FormulaPtr& b) { return a->key() < b->key(); });
  flat.erase(std::unique(flat.begin(), flat.end(),
                         [](const FormulaPtr& a, const FormulaPtr& b) { return a->key() == b->key(); }),
             flat.end());
  // complementary pair at the same level
  std::set<std::string> keys;
  for (const auto& k : flat) keys.insert(k->key());
  for (const auto& k : flat) {
    std::string negkey = k->kind == FKind::Not ? k->kids[0]->key() : "(not " + k->key() + ")";
    if (keys.count(negkey)) return conj ? f_false() : f_true();
  }
  return conj ? f_and(std::move(flat)) : f_or(std::move(flat));
}

inline FormulaPtr canon(const FormulaPtr& f, std::map<std::string, std::string>& rename, int depth) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
      return f;
    case FKind::Atom: {
      std::vector<Term> ts;
      for (const auto& t : f->terms) ts.push_back(canon_term(t, rename));
      return f_atom(f->pred, std::move(ts));
    }
    case FKind::Eq: {
      Term a = canon_term(f->terms[0], rename);
      Term b = canon_term(f->terms[1], rename);
      if (!a.is_var && !b.is_var) return a.text == b.text ? f_true() : f_false();
      if ((b.is_var ? "?" + b.text : b.text) < (a.is_var ? "?" + a.text : a.text)) std::swap(a, b);
      return f_eq(a, b);
    }
    case FKind::Not: {
      FormulaPtr c = canon(f->kids[0], rename, depth);
      if (c->kind == FKind::True) return f_false();
      if (c->kind == FKind::False) return f_true();
      if (c->kind == FKind::Not) return c->kids[0];
      return f_not(c);
    }
    case FKind::And:
    case FKind::Or:
      return canon_ac(f->kind, f->kids, rename, depth);
    default: {
      std::string fresh = "$" + std::to_string(depth);
      auto saved = rename.find(f->var);
      std::string old;
      bool had = saved != rename.end();
      if (had) old = saved->second;
      rename[f->var] = fresh;
      FormulaPtr body = canon(f->kids[0], rename, depth + 1);
      if (had)
        rename[f->var] = old;
      else
        rename.erase(f->var);
      if (body->kind == FKind::True || body->kind == FKind::False || !free_vars(body).count(fresh)) {
        // vacuous binder over a nonempty universe
        if (f->kind == FKind::Forall || f->kind == FKind::Exists) return body;
        if (f->kind == FKind::CountGeq && f->count <= 1)
          return f->count == 0 ? f_true() : body;
        if (f->kind == FKind::CountLeq && body->kind == FKind::False) return f_true();
      }
      return f_quant(f->kind, fresh, body, f->count);
    }
  }
}

}  // namespace detail

// Deterministic structural normal form: NNF, flattened and sorted AC children,
// unit absorption, duplicate and complementary-literal elimination, canonical
// bound-variable names. Equal canonical keys imply logical equivalence.
inline FormulaPtr canonicalize(const FormulaPtr& f) {
  // Simplification can remove binders, which shifts the depth-based canonical
  // names of the remaining ones, so iterate until the form is stable.
  FormulaPtr cur = to_nnf(f);
  for (int pass = 0; pass < 64; ++pass) {
    std::map<std::string, std::string> rename;
    FormulaPtr next = detail::canon(cur, rename, 0);
    if (pass > 0 && next->key() == cur->key()) return next;
    cur = next;
  }
  return cur;
}

}  // namespace gsynth

#endif
