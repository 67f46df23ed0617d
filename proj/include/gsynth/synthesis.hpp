#ifndef GSYNTH_SYNTHESIS_HPP
#define GSYNTH_SYNTHESIS_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formula.hpp"

namespace gsynth {

// Explicit two-player game graph: the arena stripped down to what strategy
// extraction needs. States are dense ids.
struct Game {
  struct Edge {
    int src;
    ActionTerm action;
    int dst;
    bool env = false;
  };
  int num_states = 0;
  std::vector<bool> final_state;
  std::vector<bool> accepting;
  std::vector<int> initials;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out;  // edge indices per source
  std::vector<std::vector<int>> in;   // edge indices per target

  int add_state(bool fin, bool acc) {
    final_state.push_back(fin);
    accepting.push_back(acc);
    out.emplace_back();
    in.emplace_back();
    return num_states++;
  }
  void add_edge(int src, ActionTerm a, int dst, bool env) {
    int id = static_cast<int>(edges.size());
    edges.push_back({src, std::move(a), dst, env});
    out[src].push_back(id);
    in[dst].push_back(id);
  }

  std::vector<int> env_succ(int s) const {
    std::vector<int> r;
    for (int e : out[s])
      if (edges[e].env) r.push_back(edges[e].dst);
    return r;
  }
  std::vector<int> ctrl_succ(int s) const {
    std::vector<int> r;
    for (int e : out[s])
      if (!edges[e].env) r.push_back(edges[e].dst);
    return r;
  }
};

// Partial map from states to chosen action sets.
struct Strategy {
  std::map<int, std::vector<ActionTerm>> choices;

  bool defined(int s) const { return choices.count(s) > 0; }
  bool chooses(int s, const ActionTerm& a) const {
    auto it = choices.find(s);
    if (it == choices.end()) return false;
    for (const auto& b : it->second)
      if (b == a) return true;
    return false;
  }
};

// Validity of an action set in a state: only existing transitions, all
// outgoing environment actions included, empty only at final states.
inline bool is_valid_action_set(const Game& g, int s, const std::vector<ActionTerm>& u) {
  std::set<std::string> outgoing, outgoing_env;
  for (int e : g.out[s]) {
    outgoing.insert(g.edges[e].action.str());
    if (g.edges[e].env) outgoing_env.insert(g.edges[e].action.str());
  }
  std::set<std::string> chosen;
  for (const auto& a : u) chosen.insert(a.str());
  for (const auto& a : chosen)
    if (!outgoing.count(a)) return false;
  for (const auto& a : outgoing_env)
    if (!chosen.count(a)) return false;
  if (chosen.empty() && !g.final_state[s]) return false;
  return true;
}

struct CheckResult {
  bool ok = true;
  std::string diagnostic;
};

namespace detail {

inline bool strategy_stop_capable(const Game& g, const Strategy& s, int st) {
  if (!g.final_state[st]) return false;
  auto it = s.choices.find(st);
  if (it == s.choices.end()) return false;
  std::set<std::string> env;
  for (int e : g.out[st])
    if (g.edges[e].env) env.insert(g.edges[e].action.str());
  for (const auto& a : it->second)
    if (!env.count(a.str())) return false;  // a chosen controllable action
  return true;
}

}  // namespace detail

// Full play analysis: structural validity, winning (every state where a play
// may stop is accepting), terminating (every cycle of the strategy subgraph
// passes through a state where the environment may stop the play).
inline CheckResult check_strategy(const Game& g, const Strategy& sigma) {
  for (int s0 : g.initials)
    if (!sigma.defined(s0)) return {false, "undefined on initial state " + std::to_string(s0)};

  // reachable closure under chosen actions
  std::vector<int> stack;
  std::set<int> reach;
  for (int s0 : g.initials) {
    if (reach.insert(s0).second) stack.push_back(s0);
  }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    auto it = sigma.choices.find(s);
    if (it == sigma.choices.end())
      return {false, "undefined on reachable state " + std::to_string(s)};
    if (!is_valid_action_set(g, s, it->second))
      return {false, "invalid action set at state " + std::to_string(s)};
    for (int e : g.out[s]) {
      if (!sigma.chooses(s, g.edges[e].action)) continue;
      if (reach.insert(g.edges[e].dst).second) stack.push_back(g.edges[e].dst);
    }
  }

  // winning: every reachable stop-capable state must be accepting
  for (int s : reach) {
    if (detail::strategy_stop_capable(g, sigma, s) && !g.accepting[s])
      return {false, "play may stop at non-accepting state " + std::to_string(s)};
  }

  // terminating: drop stop-capable states; the rest must be acyclic
  std::map<int, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::pair<int, size_t>> dfs;
  for (int root : reach) {
    if (color.count(root) || detail::strategy_stop_capable(g, sigma, root)) continue;
    dfs.push_back({root, 0});
    color[root] = 1;
    while (!dfs.empty()) {
      auto& [s, i] = dfs.back();
      bool descended = false;
      while (i < g.out[s].size()) {
        const auto& e = g.edges[g.out[s][i++]];
        if (!sigma.chooses(s, e.action)) continue;
        if (!reach.count(e.dst) || detail::strategy_stop_capable(g, sigma, e.dst)) continue;
        auto it = color.find(e.dst);
        if (it == color.end()) {
          color[e.dst] = 1;
          dfs.push_back({e.dst, 0});
          descended = true;
          break;
        }
        if (it->second == 1)
          return {false, "cycle without a stop-capable state through state " +
                             std::to_string(e.dst)};
      }
      if (descended) continue;
      color[s] = 2;
      dfs.pop_back();
    }
  }
  return {};
}

// Deterministic hypothesis enumeration: decreasing cardinality, lexicographic
// by member ids within one cardinality.
inline std::vector<std::vector<int>> hypothesis_order(const std::vector<int>& finals,
                                                      size_t cap = 20) {
  if (finals.size() > cap)
    throw ResourceError("hypothesis space over " + std::to_string(finals.size()) +
                        " states; raise --max-hypothesis-states to allow");
  std::vector<int> ids = finals;
  std::sort(ids.begin(), ids.end());
  size_t n = ids.size();
  std::vector<std::vector<int>> out;
  for (size_t k = n + 1; k-- > 0;) {
    // combinations of size k in lexicographic order
    std::vector<size_t> idx(k);
    for (size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      std::vector<int> h;
      for (size_t i : idx) h.push_back(ids[i]);
      out.push_back(std::move(h));
      if (k == 0) break;
      // advance
      size_t i = k;
      while (i-- > 0) {
        if (idx[i] + (k - i) < n) {
          ++idx[i];
          for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
          break;
        }
        if (i == 0) {
          i = k + 1;
          break;
        }
      }
      if (i == k + 1 || k == 0) break;
    }
  }
  return out;
}

struct SynthesisReport {
  bool realizable = false;
  Strategy strategy;
  size_t hypotheses_tried = 0;
  size_t arena_states = 0, arena_edges = 0;
  size_t strategy_states = 0, strategy_edges = 0;
  std::vector<int> last_reach;  // diagnostics for unrealizable outcomes
};

namespace detail {

struct LabelResult {
  bool success = false;
  Strategy sigma;
  std::set<int> reach;  // the final R set
};

// One pass of the backward labeling loop for a fixed hypothesis H.
inline LabelResult label_for_hypothesis(const Game& g, const std::set<int>& h) {
  std::set<int> G = h, R;
  Strategy sigma;
  for (int s : h)
    if (g.env_succ(s).empty()) {
      R.insert(s);
      sigma.choices[s] = {};
    }
  std::deque<int> q;
  std::set<int> queued;
  auto enqueue_preds = [&](int s) {
    for (int e : g.in[s]) {
      int p = g.edges[e].src;
      if (queued.insert(p).second) q.push_back(p);
    }
  };
  for (int s = 0; s < g.num_states; ++s) {
    bool touches = false;
    for (int e : g.out[s])
      if (G.count(g.edges[e].dst)) touches = true;
    if (touches && queued.insert(s).second) q.push_back(s);
  }
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    queued.erase(s);
    if (g.final_state[s] && !g.accepting[s] && g.ctrl_succ(s).empty()) continue;
    if (R.count(s)) continue;
    auto es = g.env_succ(s);
    bool enter;
    if (!es.empty()) {
      enter = true;
      for (int t : es)
        if (!G.count(t)) enter = false;
      // a final non-accepting state must also keep a controllable move into
      // G, or the chosen set degenerates to environment actions only and the
      // environment may stop the play there
      if (enter && g.final_state[s] && !g.accepting[s]) {
        bool ctrl_in = false;
        for (int t : g.ctrl_succ(s))
          if (G.count(t)) ctrl_in = true;
        enter = ctrl_in;
      }
    } else {
      enter = false;
      for (int t : g.ctrl_succ(s))
        if (G.count(t)) enter = true;
    }
    if (!enter) continue;
    if (g.final_state[s] && g.accepting[s]) {
      std::vector<ActionTerm> u;
      for (int e : g.out[s])
        if (g.edges[e].env) u.push_back(g.edges[e].action);
      sigma.choices[s] = std::move(u);
    } else {
      // membership judged before s joins G, so chosen actions only lead to
      // states labeled earlier; cycles then always pass through a final
      // accepting state where the play may stop
      std::vector<ActionTerm> u;
      std::set<std::string> seen;
      for (int e : g.out[s])
        if (G.count(g.edges[e].dst) && seen.insert(g.edges[e].action.str()).second)
          u.push_back(g.edges[e].action);
      sigma.choices[s] = std::move(u);
    }
    G.insert(s);
    R.insert(s);
    enqueue_preds(s);
  }
  bool ok = true;
  for (int s : h)
    if (!R.count(s)) ok = false;
  for (int s : g.initials)
    if (!R.count(s)) ok = false;
  return {ok, std::move(sigma), std::move(R)};
}

inline Strategy restrict_reachable(const Game& g, const Strategy& sigma) {
  Strategy out;
  std::vector<int> stack;
  std::set<int> seen;
  for (int s0 : g.initials)
    if (seen.insert(s0).second) stack.push_back(s0);
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    auto it = sigma.choices.find(s);
    if (it == sigma.choices.end()) continue;
    out.choices[s] = it->second;
    for (int e : g.out[s]) {
      const auto& edge = g.edges[e];
      bool chosen = false;
      for (const auto& a : it->second)
        if (a == edge.action) chosen = true;
      if (chosen && seen.insert(edge.dst).second) stack.push_back(edge.dst);
    }
  }
  return out;
}

}  // namespace detail

// Strategy extraction. The labeling pass is monotone in the hypothesis: if a
// state set H' admits a strategy, then so does any labeling run started from
// H ⊇ H' after intersecting with its own reach set. Iterating H <- H ∩ R
// from the full final∧accepting set therefore finds a solution whenever one
// exists, without enumerating the exponential hypothesis space. The explicit
// enumeration (decreasing cardinality) is kept as a cross-check for small
// final sets and exercised by the differential tests.
inline SynthesisReport synthesize(const Game& g, size_t hypothesis_cap = 20,
                                  bool exhaustive_fallback = true) {
  SynthesisReport rep;
  rep.arena_states = g.num_states;
  rep.arena_edges = g.edges.size();

  std::vector<int> finals;
  for (int s = 0; s < g.num_states; ++s)
    if (g.final_state[s] && g.accepting[s]) finals.push_back(s);

  auto finish = [&](detail::LabelResult&& r) {
    rep.realizable = true;
    rep.strategy = detail::restrict_reachable(g, r.sigma);
    rep.strategy_states = rep.strategy.choices.size();
    for (auto& [s, u] : rep.strategy.choices) {
      for (int e : g.out[s])
        for (const auto& a : u)
          if (g.edges[e].action == a) rep.strategy_edges++;
    }
  };

  // greedy refinement
  std::set<int> h(finals.begin(), finals.end());
  while (true) {
    ++rep.hypotheses_tried;
    auto r = detail::label_for_hypothesis(g, h);
    if (r.success) {
      finish(std::move(r));
      return rep;
    }
    std::set<int> next;
    for (int s : h)
      if (r.reach.count(s)) next.insert(s);
    rep.last_reach.assign(r.reach.begin(), r.reach.end());
    if (next == h) break;
    h = std::move(next);
  }

  if (exhaustive_fallback && finals.size() <= hypothesis_cap) {
    for (auto& hv : hypothesis_order(finals, hypothesis_cap)) {
      ++rep.hypotheses_tried;
      auto r = detail::label_for_hypothesis(g, {hv.begin(), hv.end()});
      if (r.success) {
        finish(std::move(r));
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace gsynth

#endif
