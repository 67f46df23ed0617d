#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gsynth/arena.hpp"
#include "gsynth/oracle.hpp"
#include "testutil.hpp"

using namespace gsynth;

namespace {

Term v(const char* s) { return Term::var(s); }
Term n(const char* s) { return Term::name(s); }

// arena paths up to a length bound: trace string -> (final, accepting) of the
// end state
std::map<std::string, std::pair<bool, bool>> arena_paths(const Arena& a, int initial,
                                                         size_t max_len) {
  std::map<std::string, std::pair<bool, bool>> out;
  struct Node {
    int s;
    Trace z;
  };
  std::deque<Node> q{{initial, Trace{}}};
  while (!q.empty()) {
    auto [s, z] = q.front();
    q.pop_front();
    out[z.str()] = {a.states[s].final_state, a.states[s].accepting};
    if (z.size() >= max_len) continue;
    for (int t : a.out[s]) q.push_back({a.transitions[t].dst, z.append(a.transitions[t].action)});
  }
  return out;
}

int context_of(const Arena& a, const WorldModel& w) {
  for (size_t c = 0; c < a.contexts.size(); ++c) {
    bool ok = true;
    for (const auto& j : a.contexts[c])
      if (!eval_formula(w, j)) {
        ok = false;
        break;
      }
    if (ok) return static_cast<int>(c);
  }
  return -1;
}

}  // namespace

TEST_CASE("nil program with trivially true specification") {
  std::mt19937 rng(71);
  BatModel bat = testutil::random_bat(rng);
  TemporalPtr phi = tnf(t_true());
  Arena a = build_arena(bat, p_nil(), phi);
  REQUIRE(a.states.size() == 1);
  REQUIRE(a.initials.size() == 1);
  CHECK(a.transitions.empty());
  const auto& s = a.states[0];
  CHECK(s.final_state);
  CHECK(s.accepting);
  // A = {(∅,⊤), ({F Tail},⊥)}
  REQUIRE(s.A.obs.size() == 2);
  std::set<std::string> keys;
  for (const auto& o : s.A.obs) keys.insert(o.key());
  CHECK(keys.count(Obligation{{}, true}.key()));
  CHECK(keys.count(Obligation{{t_finally(t_tail())}, false}.key()));
}

TEST_CASE("single action chain") {
  std::mt19937 rng(73);
  BatModel bat = testutil::random_bat(rng);
  Arena a = build_arena(bat, p_action(bat.actions[0]), tnf(t_true()));
  REQUIRE(a.states.size() == 2);
  CHECK(a.transitions.size() == 1);
  int init = a.initials.at(0);
  CHECK_FALSE(a.states[init].final_state);
  int succ = a.transitions[0].dst;
  CHECK(a.states[succ].final_state);
  CHECK(a.states[succ].accepting);
  CHECK(verify(a).ok);
}

TEST_CASE("unsatisfiable specification stops construction immediately") {
  std::mt19937 rng(79);
  BatModel bat = testutil::random_bat(rng);
  Arena a = build_arena(bat, p_action(bat.actions[0]), tnf(t_false()));
  REQUIRE(a.initials.size() == 1);
  CHECK(a.states[a.initials[0]].A.empty());
  CHECK(a.transitions.empty());
}

TEST_CASE("verify finds a shortest violating path") {
  std::mt19937 rng(83);
  BatModel bat = testutil::random_bat(rng);
  // X ⊥: no trace with at least one action can satisfy it, so the post-action
  // final state violates
  Arena a = build_arena(bat, p_action(bat.actions[0]), tnf(t_nnf(t_next(t_false()))),
                        {.expand_empty = true});
  auto r = verify(a);
  REQUIRE_FALSE(r.ok);
  CHECK(r.path_actions.size() == 1);
  CHECK(r.path_states.size() == 2);
  CHECK(a.states[r.path_states.back()].final_state);
  CHECK_FALSE(a.states[r.path_states.back()].accepting);
}

TEST_CASE("open conditions split the context") {
  BatModel bat;
  Universe u{{"a"}};
  bat.d0 = TheoryHandle::make({}, u);  // says nothing about p
  bat.fluent_arity = {{"p", 1}};
  bat.ssas = {};
  bat.ensure_ssas();
  bat.actions = {{"act", {}}};
  SSA& p = bat.ssas.at("p");
  (void)p;
  FormulaPtr pa = f_atom("p", {n("a")});
  auto delta = p_seq(p_test(pa), p_action({"act", {}}));
  Arena a = build_arena(bat, delta, tnf(t_true()));
  CHECK(a.splits >= 1);
  REQUIRE(a.contexts.size() == 2);
  CHECK(a.initials.size() == 2);
  // one context entails p(a) and has the transition, the other has none
  size_t with_edge = 0;
  for (int s0 : a.initials)
    if (!a.out[s0].empty()) ++with_edge;
  CHECK(with_edge == 1);
}

TEST_CASE("inconsistent initial theory is rejected") {
  Universe u{{"a"}};
  FormulaPtr pa = f_atom("p", {n("a")});
  BatModel bat;
  bat.d0 = TheoryHandle::make({pa, f_not(pa)}, u);
  bat.fluent_arity = {{"p", 1}};
  bat.ensure_ssas();
  bat.actions = {{"act", {}}};
  CHECK_THROWS_AS(build_arena(bat, p_nil(), tnf(t_true())), InputError);
}

TEST_CASE("state cap raises a resource error") {
  std::mt19937 rng(89);
  BatModel bat = testutil::random_bat(rng);
  auto delta = p_star(p_choice(p_action(bat.actions[0]), p_action(bat.actions[2])));
  CHECK_THROWS_AS(build_arena(bat, delta, tnf(t_true()), {.max_states = 1}), ResourceError);
}

TEST_CASE("arena is deterministic per state and action") {
  std::mt19937 rng(97);
  for (int i = 0; i < 25; ++i) {
    BatModel bat = testutil::random_bat(rng);
    auto delta = testutil::random_program(rng, bat.actions, {"p", "q"}, 3);
    TemporalPtr phi = tnf(t_nnf(testutil::random_spec(rng, {"p", "q"}, 2)));
    Arena a;
    try {
      a = build_arena(bat, delta, phi, {.max_states = 2000});
    } catch (const ResourceError&) {
      continue;
    } catch (const InputError&) {
      continue;  // non-situation-determined random programs are fine to skip
    }
    for (size_t s = 0; s < a.states.size(); ++s) {
      std::set<std::string> acts;
      for (int t : a.out[s]) CHECK(acts.insert(a.transitions[t].action.str()).second);
    }
  }
}

TEST_CASE("paths match oracle executions and specification satisfaction") {
  std::mt19937 rng(101);
  int instances = 0, traces_checked = 0;
  while (instances < 40) {
    BatModel bat = testutil::random_bat(rng);
    auto delta = testutil::random_program(rng, bat.actions, {"p", "q"}, 2);
    TemporalPtr spec = t_nnf(testutil::random_spec(rng, {"p", "q"}, 2));
    TemporalPtr phi = tnf(spec);
    Arena a;
    try {
      a = build_arena(bat, delta, phi, {.max_states = 4000, .expand_empty = true});
    } catch (const ResourceError&) {
      continue;
    } catch (const InputError&) {
      continue;
    }
    ++instances;
    for (const auto& w : testutil::models_of(bat)) {
      int c = context_of(a, w);
      REQUIRE(c >= 0);
      auto paths = arena_paths(a, a.initials[c], 3);
      auto execs = enumerate_executions(bat, w, delta, 3);
      std::map<std::string, bool> oracle;  // trace -> terminating
      for (const auto& e : execs) oracle[e.trace.str()] = e.terminating;
      // every oracle trace is an arena path and vice versa; finality matches
      // termination; acceptance matches specification satisfaction
      for (const auto& e : execs) {
        INFO("instance " << instances << " trace [" << e.trace.str() << "]");
        auto it = paths.find(e.trace.str());
        REQUIRE(it != paths.end());
        CHECK(it->second.first == e.terminating);
        if (e.terminating) {
          bool sat = eval_trace(bat, w, Trace{}, e.trace, spec);
          CHECK(it->second.second == sat);
        }
        ++traces_checked;
      }
      for (const auto& [z, fa] : paths) {
        INFO("instance " << instances << " arena trace [" << z << "]");
        CHECK(oracle.count(z) == 1);
      }
    }
  }
  CHECK(traces_checked > 500);
}

TEST_CASE("synthesis on a built arena produces checked strategies") {
  // p starts false; controllable set(a) makes it true; goal F p(a)
  BatModel bat;
  Universe u{{"a"}};
  FormulaPtr pa = f_atom("p", {n("a")});
  bat.d0 = TheoryHandle::make({f_not(pa)}, u);
  bat.fluent_arity = {{"p", 1}};
  SSA p{"p", 1, {}, {}};
  p.pos.push_back({"set", {"u"}, f_eq(v("x"), v("u"))});
  bat.ssas = {{"p", p}};
  bat.actions = {{"set", {"a"}}};
  bat.validate();

  auto delta = p_action({"set", {"a"}});
  Arena a = build_arena(bat, delta, tnf(t_nnf(t_finally(t_fluent(pa)))));
  Game g = to_game(a, bat);
  auto rep = synthesize(g);
  REQUIRE(rep.realizable);
  CHECK(check_strategy(g, rep.strategy).ok);
  // the environment partition is empty here, so the strategy just runs set(a)
  CHECK(rep.strategy.chooses(a.initials[0], {"set", {"a"}}));
}
