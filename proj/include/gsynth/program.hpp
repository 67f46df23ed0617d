#ifndef GSYNTH_PROGRAM_HPP
#define GSYNTH_PROGRAM_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "formula.hpp"

namespace gsynth {

enum class PKind { Action, Test, Seq, Choice, Concurrent, Star };

struct ProgramExpr;
using ProgramPtr = std::shared_ptr<const ProgramExpr>;

struct ProgramExpr {
  PKind kind;
  ActionTerm action;      // Action
  FormulaPtr test;        // Test
  std::vector<ProgramPtr> kids;
  mutable std::string key_cache;

  const std::string& key() const {
    if (!key_cache.empty()) return key_cache;
    std::string s;
    switch (kind) {
      case PKind::Action: s = action.str(); break;
      case PKind::Test: s = "(test " + test->key() + ")"; break;
      case PKind::Seq: s = "(seq " + kids[0]->key() + " " + kids[1]->key() + ")"; break;
      case PKind::Choice: s = "(or " + kids[0]->key() + " " + kids[1]->key() + ")"; break;
      case PKind::Concurrent: s = "(conc " + kids[0]->key() + " " + kids[1]->key() + ")"; break;
      case PKind::Star: s = "(star " + kids[0]->key() + ")"; break;
    }
    key_cache = std::move(s);
    return key_cache;
  }

  std::string str() const {
    switch (kind) {
      case PKind::Action: return action.str();
      case PKind::Test: return test->key() + "?";
      case PKind::Seq: return "(" + kids[0]->str() + "; " + kids[1]->str() + ")";
      case PKind::Choice: return "(" + kids[0]->str() + " | " + kids[1]->str() + ")";
      case PKind::Concurrent: return "(" + kids[0]->str() + " || " + kids[1]->str() + ")";
      case PKind::Star: return kids[0]->str() + "*";
    }
    return "?";
  }
};

inline ProgramPtr p_action(ActionTerm a) {
  auto p = std::make_shared<ProgramExpr>();
  p->kind = PKind::Action;
  p->action = std::move(a);
  return p;
}
inline ProgramPtr p_test(FormulaPtr f) {
  if (!is_sentence(f)) throw InputError("test is not a sentence: " + f->key());
  auto p = std::make_shared<ProgramExpr>();
  p->kind = PKind::Test;
  p->test = canonicalize(std::move(f));
  return p;
}
inline ProgramPtr p_nil() {
  static ProgramPtr nil = p_test(f_true());
  return nil;
}
inline ProgramPtr p_bin(PKind k, ProgramPtr a, ProgramPtr b) {
  auto p = std::make_shared<ProgramExpr>();
  p->kind = k;
  p->kids = {std::move(a), std::move(b)};
  return p;
}
inline ProgramPtr p_seq(ProgramPtr a, ProgramPtr b) { return p_bin(PKind::Seq, std::move(a), std::move(b)); }
inline ProgramPtr p_choice(ProgramPtr a, ProgramPtr b) { return p_bin(PKind::Choice, std::move(a), std::move(b)); }
inline ProgramPtr p_conc(ProgramPtr a, ProgramPtr b) { return p_bin(PKind::Concurrent, std::move(a), std::move(b)); }
inline ProgramPtr p_star(ProgramPtr a) {
  auto p = std::make_shared<ProgramExpr>();
  p->kind = PKind::Star;
  p->kids = {std::move(a)};
  return p;
}

inline bool is_nil(const ProgramPtr& p) {
  return p->kind == PKind::Test && p->test->kind == FKind::True;
}

// The condition under which the program may terminate immediately.
inline FormulaPtr termination_condition(const ProgramPtr& d) {
  switch (d->kind) {
    case PKind::Action: return f_false();
    case PKind::Test: return d->test;
    case PKind::Seq:
    case PKind::Concurrent:
      return canonicalize(f_and({termination_condition(d->kids[0]),
                                 termination_condition(d->kids[1])}));
    case PKind::Choice:
      return canonicalize(f_or({termination_condition(d->kids[0]),
                                termination_condition(d->kids[1])}));
    case PKind::Star: return f_true();
  }
  return f_false();
}

struct ProgramEdge {
  ActionTerm action;
  FormulaPtr guard;
  ProgramPtr target;
};

// Outgoing edges per the inductive rules; guards canonicalized and edges
// with guard bottom dropped.
inline std::vector<ProgramEdge> edges(const ProgramPtr& d) {
  std::vector<ProgramEdge> out;
  auto add = [&out](ActionTerm a, FormulaPtr g, ProgramPtr t) {
    FormulaPtr cg = canonicalize(std::move(g));
    if (cg->kind == FKind::False) return;
    out.push_back({std::move(a), std::move(cg), std::move(t)});
  };
  switch (d->kind) {
    case PKind::Action:
      add(d->action, f_true(), p_nil());
      break;
    case PKind::Test:
      break;
    case PKind::Seq: {
      for (auto& e : edges(d->kids[0]))
        add(e.action, e.guard, p_seq(e.target, d->kids[1]));
      FormulaPtr t1 = termination_condition(d->kids[0]);
      for (auto& e : edges(d->kids[1]))
        add(e.action, f_and({t1, e.guard}), e.target);
      break;
    }
    case PKind::Choice:
      for (auto& e : edges(d->kids[0])) add(e.action, e.guard, e.target);
      for (auto& e : edges(d->kids[1])) add(e.action, e.guard, e.target);
      break;
    case PKind::Concurrent:
      for (auto& e : edges(d->kids[0]))
        add(e.action, e.guard, p_conc(e.target, d->kids[1]));
      for (auto& e : edges(d->kids[1]))
        add(e.action, e.guard, p_conc(d->kids[0], e.target));
      break;
    case PKind::Star:
      for (auto& e : edges(d->kids[0]))
        add(e.action, e.guard, p_seq(e.target, d));
      break;
  }
  return out;
}

struct CharGraph {
  ProgramPtr initial;
  std::vector<ProgramPtr> nodes;  // index = node id; nodes[0] == initial
  std::map<std::string, int> node_ids;
  struct Edge {
    int src;
    ActionTerm action;
    FormulaPtr guard;
    int dst;
  };
  std::vector<Edge> edge_list;
  std::vector<std::vector<int>> out_edges;  // per node, indices into edge_list
  std::vector<FormulaPtr> term_cond;        // per node

  int id_of(const ProgramPtr& p) const {
    auto it = node_ids.find(p->key());
    return it == node_ids.end() ? -1 : it->second;
  }
};

// Least closure of the node set under the edge relation, with nodes identified
// by their structural form. Finiteness holds for the core constructs; the cap
// guards against identification bugs.
inline CharGraph characteristic_graph(const ProgramPtr& delta, size_t cap = 20000) {
  CharGraph g;
  g.initial = delta;
  std::vector<int> work;
  auto intern = [&](const ProgramPtr& p) {
    auto it = g.node_ids.find(p->key());
    if (it != g.node_ids.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    if (g.nodes.size() >= cap)
      throw ResourceError("characteristic graph exceeded " + std::to_string(cap) + " nodes");
    g.node_ids.emplace(p->key(), id);
    g.nodes.push_back(p);
    g.out_edges.emplace_back();
    g.term_cond.push_back(termination_condition(p));
    work.push_back(id);
    return id;
  };
  intern(delta);
  while (!work.empty()) {
    int id = work.back();
    work.pop_back();
    for (auto& e : edges(g.nodes[id])) {
      int dst = intern(e.target);
      g.out_edges[id].push_back(static_cast<int>(g.edge_list.size()));
      g.edge_list.push_back({id, e.action, e.guard, dst});
    }
  }
  return g;
}

// Sufficient condition for situation-determinedness: every ground action
// labels at most one outgoing edge of every node.
struct SitDetResult {
  bool ok = true;
  int node = -1;
  ActionTerm action;
};

inline SitDetResult check_situation_determined(const CharGraph& g) {
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    std::set<std::string> seen;
    for (int ei : g.out_edges[n]) {
      const auto& a = g.edge_list[ei].action;
      if (!seen.insert(a.str()).second) return {false, static_cast<int>(n), a};
    }
  }
  return {};
}

}  // namespace gsynth

#endif
