#ifndef GSYNTH_ORACLE_HPP
#define GSYNTH_ORACLE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bat.hpp"
#include "ltlf.hpp"
#include "program.hpp"
#include "synthesis.hpp"
#include "world.hpp"

// Brute-force reference semantics over explicit worlds. Everything here works
// straight from the definitions (SSA evaluation, configuration transitions)
// and deliberately avoids regression, characteristic graphs, and types, so it
// can serve as an independent oracle in differential tests.

namespace gsynth {

inline std::vector<std::vector<std::string>> arg_tuples(const Universe& u, int arity) {
  std::vector<std::vector<std::string>> out{{}};
  for (int i = 0; i < arity; ++i) {
    std::vector<std::vector<std::string>> next;
    for (const auto& t : out)
      for (const auto& n : u.objects) {
        auto t2 = t;
        t2.push_back(n);
        next.push_back(std::move(t2));
      }
    out = std::move(next);
  }
  return out;
}

// One step of progression: every ground atom's new value is the evaluation of
// its instantiated SSA right-hand side (positive effects win over negative).
inline WorldModel progress(const BatModel& bat, const WorldModel& w, const ActionTerm& alpha) {
  WorldModel next = w;
  for (const auto& [fname, ssa] : bat.ssas) {
    auto [pos, neg] = instantiate_ssa(ssa, alpha);
    if (pos.empty() && neg.empty()) continue;
    for (const auto& args : arg_tuples(w.universe, ssa.arity)) {
      auto fires = [&](const std::vector<std::pair<FormulaPtr, FormulaPtr>>& pairs) {
        for (const auto& [eps, kappa] : pairs) {
          FormulaPtr inst = eps;
          for (size_t i = 0; i < args.size(); ++i)
            inst = substitute(inst, fluent_formals()[i], args[i]);
          if (eval_formula(w, inst) && eval_formula(w, kappa)) return true;
        }
        return false;
      };
      bool now = fires(pos) || (w.holds(fname, args) && !fires(neg));
      next.valuation[ground_atom_key(fname, args)] = now;
    }
  }
  return next;
}

inline WorldModel progress_trace(const BatModel& bat, const WorldModel& w, const Trace& z) {
  WorldModel cur = w;
  for (const auto& a : z.actions) cur = progress(bat, cur, a);
  return cur;
}

// Configuration finality per the transition-semantics definition.
inline bool config_final(const WorldModel& w, const ProgramPtr& d) {
  switch (d->kind) {
    case PKind::Action: return false;
    case PKind::Test: return eval_formula(w, d->test);
    case PKind::Seq:
    case PKind::Concurrent:
      return config_final(w, d->kids[0]) && config_final(w, d->kids[1]);
    case PKind::Choice:
      return config_final(w, d->kids[0]) || config_final(w, d->kids[1]);
    case PKind::Star: return true;
  }
  return false;
}

// Single program transitions available in world w.
inline std::vector<std::pair<ActionTerm, ProgramPtr>> config_steps(const WorldModel& w,
                                                                   const ProgramPtr& d) {
  std::vector<std::pair<ActionTerm, ProgramPtr>> out;
  switch (d->kind) {
    case PKind::Action:
      out.emplace_back(d->action, p_nil());
      break;
    case PKind::Test:
      break;
    case PKind::Seq:
      for (auto& [a, r] : config_steps(w, d->kids[0])) out.emplace_back(a, p_seq(r, d->kids[1]));
      if (config_final(w, d->kids[0]))
        for (auto& [a, r] : config_steps(w, d->kids[1])) out.emplace_back(a, r);
      break;
    case PKind::Choice:
      for (auto& [a, r] : config_steps(w, d->kids[0])) out.emplace_back(a, r);
      for (auto& [a, r] : config_steps(w, d->kids[1])) out.emplace_back(a, r);
      break;
    case PKind::Concurrent:
      for (auto& [a, r] : config_steps(w, d->kids[0])) out.emplace_back(a, p_conc(r, d->kids[1]));
      for (auto& [a, r] : config_steps(w, d->kids[1])) out.emplace_back(a, p_conc(d->kids[0], r));
      break;
    case PKind::Star:
      for (auto& [a, r] : config_steps(w, d->kids[0])) out.emplace_back(a, p_seq(r, d));
      break;
  }
  return out;
}

struct Execution {
  Trace trace;
  bool terminating = false;
};

// All program executions up to a length bound, with a flag marking traces
// that reach a final configuration.
inline std::vector<Execution> enumerate_executions(const BatModel& bat, const WorldModel& w,
                                                   const ProgramPtr& delta, size_t max_len) {
  std::map<std::string, Execution> by_trace;
  struct Cfg {
    Trace z;
    ProgramPtr d;
    WorldModel w;
  };
  std::vector<Cfg> frontier{{Trace{}, delta, w}};
  std::set<std::string> seen;  // (trace, program) pairs
  while (!frontier.empty()) {
    std::vector<Cfg> next;
    for (auto& c : frontier) {
      auto& e = by_trace[c.z.str()];
      e.trace = c.z;
      if (config_final(c.w, c.d)) e.terminating = true;
      if (c.z.size() >= max_len) continue;
      for (auto& [a, r] : config_steps(c.w, c.d)) {
        Trace z2 = c.z.append(a);
        if (!seen.insert(z2.str() + "#" + r->key()).second) continue;
        next.push_back({std::move(z2), r, progress(bat, c.w, a)});
      }
    }
    frontier = std::move(next);
  }
  std::vector<Execution> out;
  for (auto& [k, e] : by_trace) out.push_back(std::move(e));
  return out;
}

// All satisfying valuations of a grounded theory over a given atom set.
inline std::vector<WorldModel> enumerate_models(const TheoryHandle& th,
                                                const std::vector<std::string>& atom_keys) {
  if (atom_keys.size() > 20)
    throw ResourceError("model enumeration over more than 20 atoms");
  std::vector<WorldModel> out;
  for (size_t bits = 0; bits < (1ull << atom_keys.size()); ++bits) {
    WorldModel w{th.universe, {}};
    for (size_t i = 0; i < atom_keys.size(); ++i) w.valuation[atom_keys[i]] = (bits >> i) & 1;
    bool ok = true;
    for (const auto& s : th.sentences)
      if (!eval_formula(w, s)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(std::move(w));
  }
  return out;
}

inline void collect_ground_atoms(const FormulaPtr& f, const Universe& u,
                                 std::set<std::string>& out) {
  if (f->kind == FKind::Atom) {
    std::vector<std::vector<std::string>> tuples{{}};
    for (const auto& t : f->terms) {
      std::vector<std::vector<std::string>> next;
      for (const auto& tp : tuples) {
        if (t.is_var) {
          for (const auto& n : u.objects) {
            auto t2 = tp;
            t2.push_back(n);
            next.push_back(std::move(t2));
          }
        } else {
          auto t2 = tp;
          t2.push_back(t.text);
          next.push_back(std::move(t2));
        }
      }
      tuples = std::move(next);
    }
    for (const auto& tp : tuples) out.insert(ground_atom_key(f->pred, tp));
  }
  for (const auto& k : f->kids) collect_ground_atoms(k, u, out);
}

inline std::vector<WorldModel> enumerate_models(const TheoryHandle& th) {
  std::set<std::string> atoms;
  for (const auto& s : th.sentences) collect_ground_atoms(s, th.universe, atoms);
  return enumerate_models(th, {atoms.begin(), atoms.end()});
}

// Exhaustive search over all valid action-set assignments of a small game,
// assigning states lazily as they become reachable. Completeness oracle for
// the backward-labeling synthesizer; reuses its winning/terminating checks.
inline std::optional<Strategy> brute_force_strategy(const Game& g) {
  if (g.num_states > 8) throw ResourceError("brute-force strategy search limited to 8 states");

  // candidate action sets per state, deduplicated by label
  std::vector<std::vector<std::vector<ActionTerm>>> cands(g.num_states);
  for (int s = 0; s < g.num_states; ++s) {
    std::map<std::string, ActionTerm> env, ctrl;
    for (int e : g.out[s]) {
      const auto& a = g.edges[e].action;
      (g.edges[e].env ? env : ctrl).emplace(a.str(), a);
    }
    std::vector<ActionTerm> ctrl_list;
    for (auto& [k, a] : ctrl) ctrl_list.push_back(a);
    for (size_t bits = 0; bits < (1ull << ctrl_list.size()); ++bits) {
      std::vector<ActionTerm> u;
      for (auto& [k, a] : env) u.push_back(a);
      for (size_t i = 0; i < ctrl_list.size(); ++i)
        if ((bits >> i) & 1) u.push_back(ctrl_list[i]);
      if (is_valid_action_set(g, s, u)) cands[s].push_back(std::move(u));
    }
  }

  Strategy sigma;
  std::function<bool(std::vector<int>)> search = [&](std::vector<int> frontier) -> bool {
    while (!frontier.empty() && sigma.defined(frontier.back())) frontier.pop_back();
    if (frontier.empty()) return check_strategy(g, sigma).ok;
    int s = frontier.back();
    frontier.pop_back();
    for (const auto& u : cands[s]) {
      sigma.choices[s] = u;
      auto next = frontier;
      for (int e : g.out[s]) {
        bool chosen = false;
        for (const auto& a : u)
          if (a == g.edges[e].action) chosen = true;
        if (chosen && !sigma.defined(g.edges[e].dst)) next.push_back(g.edges[e].dst);
      }
      if (search(next)) return true;
      sigma.choices.erase(s);
    }
    return false;
  };
  if (search(g.initials)) return sigma;
  return std::nullopt;
}

// Truth of a temporal formula in w after executing z, over remaining trace z'.
inline bool eval_trace(const BatModel& bat, const WorldModel& w, const Trace& z, const Trace& zp,
                       const TemporalPtr& phi) {
  std::vector<WorldModel> states{progress_trace(bat, w, z)};
  for (const auto& a : zp.actions) states.push_back(progress(bat, states.back(), a));
  return eval_trace(states, 0, phi);
}

}  // namespace gsynth

#endif
