#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gsynth/oracle.hpp"
#include "testutil.hpp"

using namespace gsynth;

namespace {

ProgramPtr act(const char* name) { return p_action({name, {}}); }

// minimal theory: unary p over {a,b}; set(o) makes p(o) true, clr(o) false,
// flip() toggles via eps p-dependence is avoided (keep depth 0)
BatModel tiny_bat() {
  BatModel bat;
  Universe u{{"a", "b"}};
  bat.d0 = TheoryHandle::make({}, u);
  bat.fluent_arity = {{"p", 1}};
  SSA p{"p", 1, {}, {}};
  p.pos.push_back({"set", {"u"}, f_eq(Term::var("x"), Term::var("u"))});
  p.neg.push_back({"clr", {"u"}, f_eq(Term::var("x"), Term::var("u"))});
  bat.ssas = {{"p", p}};
  bat.actions = {{"set", {"a"}}, {"set", {"b"}}, {"clr", {"a"}}, {"clr", {"b"}}};
  bat.validate();
  return bat;
}

WorldModel empty_world(const BatModel& bat) {
  WorldModel w{bat.d0.universe, {}};
  for (const auto& [f, ar] : bat.fluent_arity)
    for (const auto& args : arg_tuples(w.universe, ar))
      w.valuation[ground_atom_key(f, args)] = false;
  return w;
}

}  // namespace

TEST_CASE("progression applies instantiated effects with positive priority") {
  auto bat = tiny_bat();
  WorldModel w = empty_world(bat);
  WorldModel w1 = progress(bat, w, {"set", {"a"}});
  CHECK(w1.holds("p", {"a"}));
  CHECK_FALSE(w1.holds("p", {"b"}));
  WorldModel w2 = progress(bat, w1, {"clr", {"a"}});
  CHECK_FALSE(w2.holds("p", {"a"}));

  // simultaneous positive and negative effect on the same atom: positive wins
  BatModel both = bat;
  both.ssas.at("p").neg.push_back({"set", {"u"}, f_eq(Term::var("x"), Term::var("u"))});
  WorldModel w3 = progress(both, w, {"set", {"a"}});
  CHECK(w3.holds("p", {"a"}));
}

TEST_CASE("configuration finality follows program structure") {
  auto bat = tiny_bat();
  WorldModel w = empty_world(bat);
  w.valuation[ground_atom_key("p", {"a"})] = true;
  FormulaPtr pa = f_atom("p", {Term::name("a")});
  FormulaPtr pb = f_atom("p", {Term::name("b")});

  CHECK_FALSE(config_final(w, act("a")));
  CHECK(config_final(w, p_test(pa)));
  CHECK_FALSE(config_final(w, p_test(pb)));
  CHECK(config_final(w, p_star(act("a"))));
  CHECK(config_final(w, p_choice(p_test(pb), p_test(pa))));
  CHECK_FALSE(config_final(w, p_seq(p_test(pa), act("a"))));
}

TEST_CASE("configuration steps respect tests and sequencing") {
  auto bat = tiny_bat();
  WorldModel w = empty_world(bat);
  FormulaPtr pa = f_atom("p", {Term::name("a")});

  // p(a)? ; set(b): blocked until p(a) holds
  auto d = p_seq(p_test(pa), p_action({"set", {"b"}}));
  CHECK(config_steps(w, d).empty());
  WorldModel w1 = progress(bat, w, {"set", {"a"}});
  auto steps = config_steps(w1, d);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].first.str() == "set(b)");
}

TEST_CASE("execution enumeration marks terminating traces") {
  auto bat = tiny_bat();
  WorldModel w = empty_world(bat);
  FormulaPtr pa = f_atom("p", {Term::name("a")});

  // set(a); p(a)? — one step, then final
  auto d = p_seq(p_action({"set", {"a"}}), p_test(pa));
  auto ex = enumerate_executions(bat, w, d, 3);
  REQUIRE(ex.size() == 2);  // empty trace and [set(a)]
  for (const auto& e : ex) {
    if (e.trace.size() == 0) CHECK_FALSE(e.terminating);
    if (e.trace.size() == 1) CHECK(e.terminating);
  }

  // set(b); p(a)? — reachable trace never final
  auto d2 = p_seq(p_action({"set", {"b"}}), p_test(pa));
  for (const auto& e : enumerate_executions(bat, w, d2, 3)) CHECK_FALSE(e.terminating);

  // iteration respects the length bound
  auto d3 = p_star(p_action({"set", {"a"}}));
  auto ex3 = enumerate_executions(bat, w, d3, 4);
  CHECK(ex3.size() == 5);  // lengths 0..4
  for (const auto& e : ex3) CHECK(e.terminating);
}

TEST_CASE("model enumeration matches the reasoner's satisfiability verdicts") {
  std::mt19937 rng(59);
  Universe u{{"a", "b"}};
  GroundReasoner r(u);
  for (int i = 0; i < 60; ++i) {
    std::vector<FormulaPtr> sents;
    for (int k = 0; k < 2; ++k) sents.push_back(testutil::random_query(rng, {"p", "q"}, 2));
    auto th = TheoryHandle::make(sents, u);
    auto models = enumerate_models(th);
    CHECK((models.size() > 0) == r.consistent(sents));
    for (const auto& w : models)
      for (const auto& s : sents) CHECK(eval_formula(w, s));
  }
  CHECK_THROWS_AS(
      enumerate_models(TheoryHandle::make({f_true()}, u),
                       std::vector<std::string>(21, "x()")),
      ResourceError);
}

TEST_CASE("temporal evaluation over progressed traces") {
  auto bat = tiny_bat();
  WorldModel w = empty_world(bat);
  FormulaPtr pa = f_atom("p", {Term::name("a")});
  TemporalPtr goal = t_finally(t_fluent(pa));
  TemporalPtr always_not = t_globally(t_not(t_fluent(pa)));

  Trace z;  // start at w itself
  Trace good = Trace{}.append({"set", {"a"}});
  Trace idle = Trace{}.append({"set", {"b"}});
  CHECK(eval_trace(bat, w, z, good, goal));
  CHECK_FALSE(eval_trace(bat, w, z, idle, goal));
  CHECK(eval_trace(bat, w, z, idle, always_not));

  // prefix already did the work: F p(a) holds on the empty remaining trace
  CHECK(eval_trace(bat, w, good, Trace{}, goal));

  // Tail is true only at the last position
  TemporalPtr tail_now = t_tail();
  CHECK(eval_trace(bat, w, z, Trace{}, tail_now));
  CHECK_FALSE(eval_trace(bat, w, z, good, tail_now));
}
