#ifndef GSYNTH_BAT_HPP
#define GSYNTH_BAT_HPP

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "formula.hpp"
#include "reasoner.hpp"

namespace gsynth {

// One disjunct of a gamma: action pattern A(v...), effect descriptor epsilon
// (free vars among the fluent's formal args x, y plus the pattern vars), and
// context condition kappa (free vars among the pattern vars).
struct EffectPair {
  std::string action_fn;
  std::vector<std::string> action_vars;
  FormulaPtr eps;
  FormulaPtr kappa = f_true();
};

// Successor state axiom [a]F(x,y) == gamma+ | F(x,y) & !gamma-.
// The fluent's formal arguments are named "x" and (for arity 2) "y".
struct SSA {
  std::string fluent;
  int arity = 0;
  std::vector<EffectPair> pos;
  std::vector<EffectPair> neg;
};

inline const std::vector<std::string>& fluent_formals() {
  static const std::vector<std::string> fs{"x", "y"};
  return fs;
}

// A signed effect <F+, eps> / <F-, eps>; eps free vars match F's formals.
struct EffectLiteral {
  std::string fluent;
  bool positive = true;
  FormulaPtr eps;

  std::string key() const { return (positive ? "+" : "-") + fluent + ":" + eps->key(); }
};

// Canonical finite set of effect literals: eps canonicalized, bottom effects
// dropped, duplicates merged, deterministic order.
struct EffectSet {
  std::vector<EffectLiteral> literals;

  static EffectSet make(std::vector<EffectLiteral> lits) {
    std::map<std::string, EffectLiteral> by_key;
    for (auto& l : lits) {
      l.eps = canonicalize(l.eps);
      if (l.eps->kind == FKind::False) continue;
      by_key.emplace(l.key(), l);
    }
    EffectSet e;
    for (auto& [k, l] : by_key) e.literals.push_back(std::move(l));
    return e;
  }

  bool empty() const { return literals.empty(); }
  size_t size() const { return literals.size(); }

  std::string key() const {
    std::string s;
    for (const auto& l : literals) s += l.key() + "\n";
    return s;
  }
  bool operator==(const EffectSet& o) const { return key() == o.key(); }

  bool contains(const EffectLiteral& l) const {
    for (const auto& m : literals)
      if (m.key() == l.key()) return true;
    return false;
  }
  bool subset_of(const EffectSet& o) const {
    for (const auto& l : literals)
      if (!o.contains(l)) return false;
    return true;
  }
};

// Action theory: initial theory, one SSA per fluent, the finite ground action
// set and its controllable/environment partition.
struct BatModel {
  TheoryHandle d0;
  std::map<std::string, SSA> ssas;         // fluent name -> SSA
  std::map<std::string, int> fluent_arity;  // every declared fluent
  std::vector<ActionTerm> actions;
  std::set<std::string> env_actions;  // keys are ActionTerm::str()

  bool is_env(const ActionTerm& a) const { return env_actions.count(a.str()) > 0; }

  void validate() const {
    std::set<std::string> act_keys;
    for (const auto& a : actions) act_keys.insert(a.str());
    for (const auto& e : env_actions)
      if (!act_keys.count(e)) throw InputError("environment action not in action set: " + e);
    for (const auto& [f, ssa] : ssas) {
      auto it = fluent_arity.find(f);
      if (it == fluent_arity.end()) throw InputError("SSA for undeclared fluent: " + f);
      if (ssa.arity != it->second) throw InputError("SSA arity mismatch for " + f);
    }
  }

  // Fluents mentioned anywhere but lacking an SSA become rigid (empty gammas).
  void ensure_ssas() {
    for (const auto& [f, ar] : fluent_arity) {
      if (!ssas.count(f)) ssas.emplace(f, SSA{f, ar, {}, {}});
    }
  }
};

// Ground the gammas of one SSA for a specific action: every pair whose
// pattern matches alpha, with pattern variables replaced by alpha's arguments.
inline std::pair<std::vector<std::pair<FormulaPtr, FormulaPtr>>,
                 std::vector<std::pair<FormulaPtr, FormulaPtr>>>
instantiate_ssa(const SSA& ssa, const ActionTerm& alpha) {
  auto inst = [&](const std::vector<EffectPair>& pairs) {
    std::vector<std::pair<FormulaPtr, FormulaPtr>> out;
    for (const auto& p : pairs) {
      if (p.action_fn != alpha.fn || p.action_vars.size() != alpha.args.size()) continue;
      FormulaPtr eps = p.eps, kappa = p.kappa;
      for (size_t i = 0; i < p.action_vars.size(); ++i) {
        eps = substitute(eps, p.action_vars[i], alpha.args[i]);
        kappa = substitute(kappa, p.action_vars[i], alpha.args[i]);
      }
      out.emplace_back(eps, kappa);
    }
    return out;
  };
  return {inst(ssa.pos), inst(ssa.neg)};
}

inline void collect_fluents(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == FKind::Atom) out.insert(f->pred);
  for (const auto& k : f->kids) collect_fluents(k, out);
}

// Edge (F, F') iff F' occurs in some effect descriptor of F's SSA.
inline std::map<std::string, std::set<std::string>> dependency_graph(const BatModel& bat) {
  std::map<std::string, std::set<std::string>> g;
  for (const auto& [f, ssa] : bat.ssas) {
    auto& edges = g[f];
    for (const auto* side : {&ssa.pos, &ssa.neg})
      for (const auto& p : *side) collect_fluents(p.eps, edges);
  }
  return g;
}

namespace detail {

inline int depth_of(const std::string& f, const std::map<std::string, std::set<std::string>>& g,
                    std::map<std::string, int>& memo, std::vector<std::string>& stack) {
  auto it = memo.find(f);
  if (it != memo.end()) {
    if (it->second == -1) {
      std::string cycle;
      for (const auto& s : stack) cycle += s + " -> ";
      throw InputError("cyclic fluent dependencies: " + cycle + f);
    }
    return it->second;
  }
  memo[f] = -1;  // on stack
  stack.push_back(f);
  int best = 0;
  auto git = g.find(f);
  if (git != g.end())
    for (const auto& succ : git->second) {
      if (!g.count(succ)) continue;  // fluent without SSA entry: depth 0
      best = std::max(best, 1 + depth_of(succ, g, memo, stack));
    }
  stack.pop_back();
  memo[f] = best;
  return best;
}

}  // namespace detail

// Longest dependency-path length from F; throws naming a cycle if cyclic.
inline int fluent_depth(const BatModel& bat, const std::string& fluent) {
  auto g = dependency_graph(bat);
  std::map<std::string, int> memo;
  std::vector<std::string> stack;
  return detail::depth_of(fluent, g, memo, stack);
}

inline int bat_fluent_depth(const BatModel& bat) {
  int best = 0;
  for (const auto& [f, ssa] : bat.ssas) best = std::max(best, fluent_depth(bat, f));
  return best;
}

namespace detail {

// Rename bound variables that collide with `avoid` so substitution into the
// body cannot capture.
inline FormulaPtr rename_bound(const FormulaPtr& f, const std::set<std::string>& avoid, int& fresh) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::Atom:
    case FKind::Eq:
      return f;
    case FKind::Not:
      return f_not(rename_bound(f->kids[0], avoid, fresh));
    case FKind::And:
    case FKind::Or: {
      std::vector<FormulaPtr> ks;
      for (const auto& k : f->kids) ks.push_back(rename_bound(k, avoid, fresh));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    default: {
      FormulaPtr body = rename_bound(f->kids[0], avoid, fresh);
      if (!avoid.count(f->var)) return f_quant(f->kind, f->var, body, f->count);
      std::string nv = "~v" + std::to_string(fresh++);
      return f_quant(f->kind, nv, substitute_var(body, f->var, Term::var(nv)), f->count);
    }
  }
}

}  // namespace detail

// eps with the fluent formals x (and y) replaced by the atom's actual terms.
inline FormulaPtr instantiate_eps(const FormulaPtr& eps, const std::vector<Term>& args) {
  std::set<std::string> avoid;
  for (const auto& t : args)
    if (t.is_var) avoid.insert(t.text);
  int fresh = 0;
  FormulaPtr e = detail::rename_bound(eps, avoid, fresh);
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& formal = fluent_formals()[i];
    if (args[i].is_var && args[i].text == formal) continue;
    e = substitute_var(e, formal, args[i]);
  }
  return e;
}

// Regression of phi through an effect set: each atom F(v) becomes
// (F(v) & all negative eps refuted) | (some positive eps fires).
inline FormulaPtr regress_raw(const EffectSet& e, const FormulaPtr& phi) {
  switch (phi->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::Eq:
      return phi;
    case FKind::Atom: {
      std::vector<FormulaPtr> neg_guards{phi};
      std::vector<FormulaPtr> pos;
      for (const auto& l : e.literals) {
        if (l.fluent != phi->pred) continue;
        FormulaPtr inst = instantiate_eps(l.eps, phi->terms);
        if (l.positive)
          pos.push_back(inst);
        else
          neg_guards.push_back(f_not(inst));
      }
      if (pos.empty() && neg_guards.size() == 1) return phi;
      std::vector<FormulaPtr> disj{f_and(std::move(neg_guards))};
      for (auto& p : pos) disj.push_back(std::move(p));
      return f_or(std::move(disj));
    }
    case FKind::Not:
      return f_not(regress_raw(e, phi->kids[0]));
    case FKind::And:
    case FKind::Or: {
      std::vector<FormulaPtr> ks;
      for (const auto& k : phi->kids) ks.push_back(regress_raw(e, k));
      return phi->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    default:
      return f_quant(phi->kind, phi->var, regress_raw(e, phi->kids[0]), phi->count);
  }
}

inline FormulaPtr regress(const EffectSet& e, const FormulaPtr& phi) {
  return canonicalize(regress_raw(e, phi));
}

// Effects of executing alpha given accumulated effects E. Context conditions
// are judged by the caller: kappa_true receives the regressed condition
// R[E, kappa] and answers whether the current type declares it true (an open
// verdict surfaces as a split request exception from the arena's callback).
inline EffectSet effects_of(const BatModel& bat, const EffectSet& e, const ActionTerm& alpha,
                            const std::function<bool(const FormulaPtr&)>& kappa_true) {
  std::vector<EffectLiteral> lits;
  for (const auto& [fname, ssa] : bat.ssas) {
    auto [pos, neg] = instantiate_ssa(ssa, alpha);
    for (bool positive : {true, false}) {
      for (const auto& [eps, kappa] : positive ? pos : neg) {
        FormulaPtr cond = regress(e, kappa);
        if (cond->kind == FKind::False) continue;
        if (cond->kind != FKind::True && !kappa_true(cond)) continue;
        lits.push_back({fname, positive, eps});
      }
    }
  }
  return EffectSet::make(std::move(lits));
}

// Accumulation E0 |> E1: E1 regressed through E0, plus E0's positives guarded
// against E1's negatives, plus E0's negatives unchanged.
inline EffectSet accumulate(const EffectSet& e0, const EffectSet& e1) {
  std::vector<EffectLiteral> lits;
  for (const auto& l : e1.literals) lits.push_back({l.fluent, l.positive, regress_raw(e0, l.eps)});
  for (const auto& l : e0.literals) {
    if (!l.positive) {
      lits.push_back(l);
      continue;
    }
    std::vector<FormulaPtr> conj{l.eps};
    for (const auto& m : e1.literals)
      if (!m.positive && m.fluent == l.fluent) conj.push_back(f_not(regress_raw(e0, m.eps)));
    lits.push_back({l.fluent, true, f_and(std::move(conj))});
  }
  return EffectSet::make(std::move(lits));
}

// Eager stratified closure of all effects reachable by any action sequence,
// by fluent depth. Exponential; guarded by a literal-count cap and meant for
// diagnostics and differential tests, not for arena construction.
inline EffectSet relevant_effects(const BatModel& bat, size_t cap = 4096) {
  int maxdepth = bat_fluent_depth(bat);
  std::map<std::string, int> depth;
  for (const auto& [f, ssa] : bat.ssas) depth[f] = fluent_depth(bat, f);

  // raw instantiated descriptors per fluent and sign
  std::map<std::string, std::vector<FormulaPtr>> pos_desc, neg_desc;
  for (const auto& [f, ssa] : bat.ssas) {
    for (const auto& alpha : bat.actions) {
      auto [pos, neg] = instantiate_ssa(ssa, alpha);
      for (auto& [eps, kappa] : pos) pos_desc[f].push_back(eps);
      for (auto& [eps, kappa] : neg) neg_desc[f].push_back(eps);
    }
  }

  std::vector<EffectLiteral> acc;
  auto push = [&](EffectLiteral l) {
    acc.push_back(std::move(l));
    if (acc.size() > cap)
      throw ResourceError("relevant-effects closure exceeded " + std::to_string(cap) + " literals");
  };

  // stratum 0
  for (const auto& [f, d] : depth) {
    if (d != 0) continue;
    for (const auto& eps : pos_desc[f]) push({f, true, eps});
    for (const auto& eps : neg_desc[f]) push({f, false, eps});
  }
  EffectSet prev = EffectSet::make(acc);

  for (int i = 1; i <= maxdepth; ++i) {
    // all subsets of the previous stratum
    if (prev.size() > 16)
      throw ResourceError("relevant-effects stratum too large for subset enumeration");
    std::vector<EffectSet> subsets;
    for (size_t bits = 0; bits < (1ull << prev.size()); ++bits) {
      std::vector<EffectLiteral> sub;
      for (size_t k = 0; k < prev.size(); ++k)
        if ((bits >> k) & 1) sub.push_back(prev.literals[k]);
      subsets.push_back(EffectSet::make(std::move(sub)));
    }
    for (const auto& [f, d] : depth) {
      if (d != i) continue;
      for (const auto& eps : neg_desc[f])
        for (const auto& sub : subsets) push({f, false, regress_raw(sub, eps)});
      // positives: R[E, phi] & /\ {-R[E', phi'] : (phi', E') in X}
      std::vector<std::pair<FormulaPtr, EffectSet>> neg_opts;
      for (const auto& eps : neg_desc[f])
        for (const auto& sub : subsets) neg_opts.emplace_back(eps, sub);
      if (neg_opts.size() > 16)
        throw ResourceError("relevant-effects guard combinations too large");
      for (const auto& eps : pos_desc[f]) {
        for (const auto& sub : subsets) {
          for (size_t bits = 0; bits < (1ull << neg_opts.size()); ++bits) {
            std::vector<FormulaPtr> conj{regress_raw(sub, eps)};
            for (size_t k = 0; k < neg_opts.size(); ++k)
              if ((bits >> k) & 1)
                conj.push_back(f_not(regress_raw(neg_opts[k].second, neg_opts[k].first)));
            push({f, true, f_and(std::move(conj))});
          }
        }
      }
    }
    prev = EffectSet::make(acc);
  }
  return EffectSet::make(std::move(acc));
}

}  // namespace gsynth

#endif
