#ifndef GSYNTH_TESTUTIL_HPP
#define GSYNTH_TESTUTIL_HPP

#include <random>
#include <string>
#include <vector>

#include "gsynth/bat.hpp"
#include "gsynth/oracle.hpp"
#include "gsynth/program.hpp"

// Random generators shared by the differential suites. Deterministic given
// the caller's RNG; sizes kept small so brute-force oracles stay feasible.

namespace gsynth::testutil {

inline Universe small_universe() { return Universe{{"a", "b"}}; }

// A formula over the given unary fluents, variable x and/or a pattern
// variable, with equalities against universe names.
inline FormulaPtr random_eps(std::mt19937& rng, const std::vector<std::string>& fluents,
                             const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
  std::uniform_int_distribution<size_t> fv(0, fluents.empty() ? 0 : fluents.size() - 1);
  std::uniform_int_distribution<size_t> vv(0, vars.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  switch (pick(rng)) {
    case 0:
      if (fluents.empty()) return f_eq(Term::var(vars[vv(rng)]), Term::name("a"));
      return f_atom(fluents[fv(rng)], {Term::var(vars[vv(rng)])});
    case 1: return f_eq(Term::var(vars[vv(rng)]), Term::name(coin(rng) ? "a" : "b"));
    case 2: return coin(rng) ? f_true() : f_eq(Term::var(vars[vv(rng)]), Term::var(vars[vv(rng)]));
    case 3: return f_not(random_eps(rng, fluents, vars, depth - 1));
    case 4:
      return f_and({random_eps(rng, fluents, vars, depth - 1),
                    random_eps(rng, fluents, vars, depth - 1)});
    default:
      return f_or({random_eps(rng, fluents, vars, depth - 1),
                   random_eps(rng, fluents, vars, depth - 1)});
  }
}

// Acyclic theory over unary fluents p (depth 0) and q (may depend on p), with
// ground actions mka/rma/mkq and one environment action env.
inline BatModel random_bat(std::mt19937& rng) {
  BatModel bat;
  Universe u = small_universe();
  bat.d0 = TheoryHandle::make({}, u);
  bat.fluent_arity = {{"p", 1}, {"q", 1}};

  std::uniform_int_distribution<int> coin(0, 1);
  SSA p{"p", 1, {}, {}};
  p.pos.push_back({"mka", {"u"}, random_eps(rng, {}, {"x", "u"}, 1)});
  p.neg.push_back({"rma", {"u"}, random_eps(rng, {}, {"x", "u"}, 1)});
  if (coin(rng)) p.pos.push_back({"env", {}, random_eps(rng, {}, {"x"}, 1)});
  SSA q{"q", 1, {}, {}};
  q.pos.push_back({"mkq", {}, random_eps(rng, {"p"}, {"x"}, 1)});
  if (coin(rng)) q.neg.push_back({"mka", {"u"}, random_eps(rng, {"p"}, {"x", "u"}, 1)});
  bat.ssas = {{"p", p}, {"q", q}};

  for (const auto& n : u.objects) {
    bat.actions.push_back({"mka", {n}});
    bat.actions.push_back({"rma", {n}});
  }
  bat.actions.push_back({"mkq", {}});
  bat.actions.push_back({"env", {}});
  bat.env_actions = {ActionTerm{"env", {}}.str()};
  bat.validate();
  return bat;
}

inline WorldModel random_world(std::mt19937& rng, const BatModel& bat) {
  WorldModel w{bat.d0.universe, {}};
  std::uniform_int_distribution<int> coin(0, 1);
  for (const auto& [f, ar] : bat.fluent_arity)
    for (const auto& args : arg_tuples(w.universe, ar))
      w.valuation[ground_atom_key(f, args)] = coin(rng);
  return w;
}

// Closed query formula over the theory's fluents.
inline FormulaPtr random_query(std::mt19937& rng, const std::vector<std::string>& fluents,
                               int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 1);
  std::uniform_int_distribution<size_t> fv(0, fluents.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> cnt(1, 2);
  switch (pick(rng)) {
    case 0: return f_atom(fluents[fv(rng)], {Term::name(coin(rng) ? "a" : "b")});
    case 1: {
      FormulaPtr body = f_atom(fluents[fv(rng)], {Term::var("x")});
      switch (cnt(rng) + coin(rng)) {
        case 1: return f_exists("x", body);
        case 2: return f_forall("x", body);
        default: return f_at_least(2, "x", body);
      }
    }
    case 2: return f_not(random_query(rng, fluents, depth - 1));
    case 3:
      return f_and({random_query(rng, fluents, depth - 1), random_query(rng, fluents, depth - 1)});
    case 4:
      return f_or({random_query(rng, fluents, depth - 1), random_query(rng, fluents, depth - 1)});
    default: {
      FormulaPtr body = f_or({f_atom(fluents[fv(rng)], {Term::var("x")}),
                              f_eq(Term::var("x"), Term::name("a"))});
      return coin(rng) ? f_forall("x", body) : f_at_most(1, "x", body);
    }
  }
}

inline ProgramPtr random_program(std::mt19937& rng, const std::vector<ActionTerm>& actions,
                                 const std::vector<std::string>& fluents, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 1);
  std::uniform_int_distribution<size_t> av(0, actions.size() - 1);
  switch (pick(rng)) {
    case 0: return p_action(actions[av(rng)]);
    case 1: return p_test(random_query(rng, fluents, 1));
    case 2:
      return p_seq(random_program(rng, actions, fluents, depth - 1),
                   random_program(rng, actions, fluents, depth - 1));
    case 3:
      return p_choice(random_program(rng, actions, fluents, depth - 1),
                      random_program(rng, actions, fluents, depth - 1));
    case 4:
      return p_conc(random_program(rng, actions, fluents, depth - 1),
                    random_program(rng, actions, fluents, depth - 1));
    default: return p_star(random_program(rng, actions, fluents, depth - 1));
  }
}

// Random temporal specification over closed queries; returned in NNF.
inline TemporalPtr random_spec(std::mt19937& rng, const std::vector<std::string>& fluents,
                               int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 0);
  switch (pick(rng)) {
    case 0: return t_fluent(random_query(rng, fluents, 1));
    case 1: return t_not(random_spec(rng, fluents, depth - 1));
    case 2:
      return t_and(random_spec(rng, fluents, depth - 1), random_spec(rng, fluents, depth - 1));
    case 3:
      return t_or(random_spec(rng, fluents, depth - 1), random_spec(rng, fluents, depth - 1));
    case 4: return t_next(random_spec(rng, fluents, depth - 1));
    case 5: return t_finally(random_spec(rng, fluents, depth - 1));
    case 6: return t_globally(random_spec(rng, fluents, depth - 1));
    default:
      return t_until(random_spec(rng, fluents, depth - 1), random_spec(rng, fluents, depth - 1));
  }
}

// All worlds over the theory's declared fluents that satisfy the initial
// sentences.
inline std::vector<WorldModel> models_of(const BatModel& bat) {
  std::vector<std::string> atoms;
  for (const auto& [f, ar] : bat.fluent_arity)
    for (const auto& args : arg_tuples(bat.d0.universe, ar))
      atoms.push_back(ground_atom_key(f, args));
  if (atoms.size() > 20) throw ResourceError("model enumeration over more than 20 atoms");
  std::vector<WorldModel> out;
  for (size_t bits = 0; bits < (1ull << atoms.size()); ++bits) {
    WorldModel w{bat.d0.universe, {}};
    for (size_t i = 0; i < atoms.size(); ++i) w.valuation[atoms[i]] = (bits >> i) & 1;
    bool ok = true;
    for (const auto& s : bat.d0.sentences)
      if (!eval_formula(w, s)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(std::move(w));
  }
  return out;
}

// Random deterministic game over action labels e (environment) and a, b
// (controllable): at most one edge per label per state, 1-2 initial states.
inline Game random_game(std::mt19937& rng, int max_states = 8) {
  std::uniform_int_distribution<int> ns(1, max_states);
  std::uniform_int_distribution<int> pct(0, 99);
  Game g;
  int n = ns(rng);
  for (int i = 0; i < n; ++i) {
    bool fin = pct(rng) < 40;
    g.add_state(fin, fin && pct(rng) < 60);
  }
  std::uniform_int_distribution<int> tgt(0, n - 1);
  for (int s = 0; s < n; ++s) {
    if (pct(rng) < 35) g.add_edge(s, {"e", {}}, tgt(rng), true);
    if (pct(rng) < 55) g.add_edge(s, {"a", {}}, tgt(rng), false);
    if (pct(rng) < 45) g.add_edge(s, {"b", {}}, tgt(rng), false);
  }
  g.initials.push_back(tgt(rng));
  if (pct(rng) < 25) {
    int extra = tgt(rng);
    if (extra != g.initials[0]) g.initials.push_back(extra);
  }
  return g;
}

// Oracle-evaluated accumulated effects along a trace: contexts are judged by
// truth in the actual start world, so the result is exact for that world.
inline EffectSet accumulated_effects(const BatModel& bat, const WorldModel& w, const Trace& z) {
  EffectSet e;
  for (const auto& alpha : z.actions) {
    EffectSet step = effects_of(bat, e, alpha, [&](const FormulaPtr& cond) {
      return eval_formula(w, cond);
    });
    e = accumulate(e, step);
  }
  return e;
}

}  // namespace gsynth::testutil

#endif
