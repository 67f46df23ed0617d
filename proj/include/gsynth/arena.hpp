#ifndef GSYNTH_ARENA_HPP
#define GSYNTH_ARENA_HPP

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bat.hpp"
#include "ltlf.hpp"
#include "program.hpp"
#include "reasoner.hpp"
#include "synthesis.hpp"

namespace gsynth {

// A remaining-satisfaction obligation: the formulas chi must hold over the
// rest of the trace; theta marks that the trace may end right here.
struct Obligation {
  std::vector<TemporalPtr> chi;  // sorted by key, deduplicated
  bool theta = false;

  std::string key() const {
    std::string s = "(";
    for (const auto& c : chi) s += c->key() + ";";
    return s + (theta ? ")+" : ")-");
  }
};

struct ObligationSet {
  std::vector<Obligation> obs;  // sorted by key, deduplicated

  static ObligationSet make(std::vector<Obligation> in) {
    std::map<std::string, Obligation> by_key;
    for (auto& o : in) {
      std::map<std::string, TemporalPtr> chi;
      for (auto& c : o.chi) chi.emplace(c->key(), c);
      o.chi.clear();
      for (auto& [k, c] : chi) o.chi.push_back(c);
      by_key.emplace(o.key(), o);
    }
    ObligationSet s;
    for (auto& [k, o] : by_key) s.obs.push_back(std::move(o));
    return s;
  }

  bool empty() const { return obs.empty(); }
  bool accepting() const {
    for (const auto& o : obs)
      if (o.theta && o.chi.empty()) return true;
    return false;
  }
  std::string key() const {
    std::string s;
    for (const auto& o : obs) s += o.key() + "|";
    return s;
  }
};

struct ArenaOptions {
  size_t max_states = 20000;
  bool semantic_dedup = false;
  // States with no obligations left can never satisfy the property, so
  // synthesis stops there; exhaustive verification keeps expanding to reach
  // every final state.
  bool expand_empty = false;
};

// Finite abstraction of all program executions with specification tracking.
// States carry a type context (an id into `contexts`: the judgments refining
// the initial theory along that lineage), accumulated effects, remaining
// obligations, and a characteristic-graph node.
struct Arena {
  struct State {
    int context;
    EffectSet E;
    ObligationSet A;
    int rho;
    bool final_state = false;
    bool accepting = false;
  };
  struct Trans {
    int src;
    ActionTerm action;
    int dst;
  };

  CharGraph graph;
  TemporalPtr phi;  // the tracked formula, in terminating normal form
  std::vector<State> states;
  std::vector<int> initials;
  std::vector<Trans> transitions;
  std::vector<std::vector<int>> out;                // per state
  std::vector<std::vector<FormulaPtr>> contexts;    // judgments per context id
  size_t splits = 0;
  size_t discarded_contexts = 0;
};

namespace detail {

// Control-flow signal: a condition the current context leaves open; the
// driver forks the context on it and retries.
struct SplitRequest {
  FormulaPtr psi;
};

class BranchRun {
 public:
  BranchRun(const BatModel& bat, const CharGraph& graph, const TemporalPtr& phi,
            const std::vector<FormulaPtr>& judgments, GroundReasoner& reasoner,
            std::map<std::string, std::vector<PropAssignment>>& assignment_cache,
            const ArenaOptions& opts, size_t states_so_far)
      : bat_(bat), graph_(graph), phi_(phi), reasoner_(reasoner),
        assignment_cache_(assignment_cache), opts_(opts), states_so_far_(states_so_far) {
    sigma_ = bat.d0.sentences;
    for (const auto& j : judgments) sigma_.push_back(j);
  }

  // Complete sub-arena for one fixed context; throws SplitRequest on the
  // first open condition.
  void run() {
    ObligationSet a0 = obligations_from(phi_, EffectSet{});
    int init = intern(EffectSet{}, std::move(a0), 0);
    initial_ = init;
    while (!work_.empty()) {
      int id = work_.front();
      work_.pop_front();
      expand(id);
    }
  }

  int initial_ = -1;
  std::vector<Arena::State> states_;
  std::vector<Arena::Trans> trans_;

 private:
  bool decide_true(const FormulaPtr& regressed) {
    if (regressed->kind == FKind::True) return true;
    if (regressed->kind == FKind::False) return false;
    Verdict v = reasoner_.decide(sigma_, regressed);
    if (v == Verdict::Open) throw SplitRequest{regressed};
    return v == Verdict::Entailed;
  }

  const std::vector<PropAssignment>& assignments_of(const TemporalPtr& t) {
    auto [it, fresh] = assignment_cache_.try_emplace(t->key());
    if (fresh) it->second = enumerate_assignments(xnf(t));
    return it->second;
  }

  // (X(P), T(P)) for every minimal assignment P whose local part holds
  // under the given accumulated effects.
  ObligationSet obligations_from(const TemporalPtr& t, const EffectSet& e) {
    std::vector<Obligation> res;
    for (const auto& p : assignments_of(t)) {
      bool ok = true;
      for (const auto& lit : p.L()) {
        if (!decide_true(regress(e, lit))) {
          ok = false;
          break;
        }
      }
      if (ok) res.push_back({p.X(), p.T()});
    }
    return ObligationSet::make(std::move(res));
  }

  // Optional normalization of effect descriptors against the context:
  // literals that provably cannot fire are dropped before interning, merging
  // states whose effects differ only syntactically.
  EffectSet dedup(EffectSet e) {
    if (!opts_.semantic_dedup) return e;
    std::vector<EffectLiteral> keep;
    for (auto& l : e.literals) {
      FormulaPtr fires = l.eps;
      for (const auto& v : free_vars(fires)) fires = f_exists(v, fires);
      Verdict v = reasoner_.decide(sigma_, canonicalize(f_not(fires)));
      if (v == Verdict::Entailed) continue;
      keep.push_back(std::move(l));
    }
    return EffectSet::make(std::move(keep));
  }

  int intern(EffectSet e, ObligationSet a, int rho) {
    e = dedup(std::move(e));
    std::string key = e.key() + "#" + a.key() + "#" + std::to_string(rho);
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    if (states_so_far_ + states_.size() >= opts_.max_states)
      throw ResourceError("arena exceeded " + std::to_string(opts_.max_states) +
                          " states; raise --max-states to continue");
    Arena::State s{-1, std::move(e), std::move(a), rho};
    s.final_state = decide_true(regress(s.E, graph_.term_cond[rho]));
    s.accepting = s.A.accepting();
    int id = static_cast<int>(states_.size());
    intern_.emplace(std::move(key), id);
    states_.push_back(std::move(s));
    work_.push_back(id);
    return id;
  }

  void expand(int id) {
    // interning successors may reallocate states_, so work on a copy
    const Arena::State src = states_[id];
    if (src.A.empty() && !opts_.expand_empty) return;
    std::set<std::string> taken;
    for (int ei : graph_.out_edges[src.rho]) {
      const auto& edge = graph_.edge_list[ei];
      const EffectSet& e1 = src.E;
      if (!decide_true(regress(e1, edge.guard))) continue;
      if (!taken.insert(edge.action.str()).second)
        throw InputError("program is not situation-determined: action " + edge.action.str() +
                         " enabled twice in " + graph_.nodes[src.rho]->str());
      EffectSet step = effects_of(bat_, e1, edge.action,
                                  [this](const FormulaPtr& cond) { return decide_true(cond); });
      EffectSet e2 = accumulate(e1, step);

      std::vector<Obligation> next;
      for (const auto& ob : src.A.obs) {
        if (ob.theta) continue;
        TemporalPtr conj = t_true();
        for (const auto& c : ob.chi) conj = conj->kind == TKind::True ? c : t_and(conj, c);
        for (const auto& o2 : obligations_from(conj, e2).obs) next.push_back(o2);
      }
      int dst = intern(e2, ObligationSet::make(std::move(next)), edge.dst);
      trans_.push_back({id, edge.action, dst});
    }
  }

  const BatModel& bat_;
  const CharGraph& graph_;
  const TemporalPtr& phi_;
  GroundReasoner& reasoner_;
  std::map<std::string, std::vector<PropAssignment>>& assignment_cache_;
  const ArenaOptions& opts_;
  size_t states_so_far_;
  std::vector<FormulaPtr> sigma_;
  std::map<std::string, int> intern_;
  std::deque<int> work_;
};

}  // namespace detail

// Fixpoint of initialize/split/expand. Each context is built from scratch
// with its judgment set; an open condition forks the context into the two
// refinements (inconsistent ones discarded) and both are re-run.
inline Arena build_arena(const BatModel& bat, const ProgramPtr& delta, const TemporalPtr& phi,
                         const ArenaOptions& opts = {}) {
  if (!t_is_nnf(phi)) throw InputError("temporal formula must be in negation normal form");
  GroundReasoner reasoner(bat.d0.universe);
  if (!reasoner.consistent(bat.d0.sentences))
    throw InputError("initial theory is inconsistent");

  Arena arena;
  arena.graph = characteristic_graph(delta);
  arena.phi = phi;
  arena.out.clear();

  std::map<std::string, std::vector<PropAssignment>> assignment_cache;
  std::deque<std::vector<FormulaPtr>> pending{{}};
  while (!pending.empty()) {
    std::vector<FormulaPtr> judgments = std::move(pending.front());
    pending.pop_front();
    detail::BranchRun run(bat, arena.graph, phi, judgments, reasoner, assignment_cache, opts,
                          arena.states.size());
    try {
      run.run();
    } catch (const detail::SplitRequest& split) {
      ++arena.splits;
      for (const FormulaPtr& signed_psi : {split.psi, canonicalize(f_not(split.psi))}) {
        std::vector<FormulaPtr> refined = judgments;
        refined.push_back(signed_psi);
        std::vector<FormulaPtr> sigma = bat.d0.sentences;
        for (const auto& j : refined) sigma.push_back(j);
        if (reasoner.consistent(sigma))
          pending.push_back(std::move(refined));
        else
          ++arena.discarded_contexts;
      }
      continue;
    }
    int context = static_cast<int>(arena.contexts.size());
    int offset = static_cast<int>(arena.states.size());
    arena.contexts.push_back(std::move(judgments));
    for (auto& s : run.states_) {
      s.context = context;
      arena.states.push_back(std::move(s));
      arena.out.emplace_back();
    }
    arena.initials.push_back(offset + run.initial_);
    for (auto& t : run.trans_) {
      int id = static_cast<int>(arena.transitions.size());
      arena.transitions.push_back({t.src + offset, t.action, t.dst + offset});
      arena.out[t.src + offset].push_back(id);
    }
  }
  return arena;
}

struct VerifyResult {
  bool ok = true;
  std::vector<int> path_states;          // initial .. violating final
  std::vector<ActionTerm> path_actions;  // one shorter than path_states
};

// Every reachable final state must be accepting; otherwise reports a
// shortest path to a violation.
inline VerifyResult verify(const Arena& arena) {
  std::map<int, int> via;  // state -> incoming transition id (-1 for initial)
  std::deque<int> q;
  for (int s0 : arena.initials) {
    if (via.emplace(s0, -1).second) q.push_back(s0);
  }
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    if (arena.states[s].final_state && !arena.states[s].accepting) {
      VerifyResult r;
      r.ok = false;
      int cur = s;
      while (true) {
        r.path_states.push_back(cur);
        int t = via.at(cur);
        if (t == -1) break;
        r.path_actions.push_back(arena.transitions[t].action);
        cur = arena.transitions[t].src;
      }
      std::reverse(r.path_states.begin(), r.path_states.end());
      std::reverse(r.path_actions.begin(), r.path_actions.end());
      return r;
    }
    for (int t : arena.out[s]) {
      int dst = arena.transitions[t].dst;
      if (via.emplace(dst, t).second) q.push_back(dst);
    }
  }
  return {};
}

// Explicit game view for strategy extraction: same state numbering, edges
// marked by the environment partition.
inline Game to_game(const Arena& arena, const BatModel& bat) {
  Game g;
  for (const auto& s : arena.states) g.add_state(s.final_state, s.accepting);
  g.initials = arena.initials;
  for (const auto& t : arena.transitions) {
    g.add_edge(t.src, t.action, t.dst, bat.is_env(t.action));
  }
  return g;
}

}  // namespace gsynth

#endif
