#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gsynth/formula.hpp"
#include "gsynth/reasoner.hpp"
#include "gsynth/world.hpp"

using namespace gsynth;

namespace {

FormulaPtr P(const std::string& n) { return f_atom("P", {Term::name(n)}); }
FormulaPtr Px(const std::string& v) { return f_atom("P", {Term::var(v)}); }

void collect_atom_keys(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == FKind::Atom) {
    std::vector<std::string> args;
    for (const auto& t : f->terms) args.push_back(t.text);
    out.insert(ground_atom_key(f->pred, args));
  }
  for (const auto& k : f->kids) collect_atom_keys(k, out);
}

// all worlds over the ground atoms of f (after grounding over u)
std::vector<WorldModel> all_worlds(const FormulaPtr& f, const Universe& u) {
  std::set<std::string> keys;
  collect_atom_keys(ground(f, u), keys);
  std::vector<std::string> ks(keys.begin(), keys.end());
  std::vector<WorldModel> out;
  for (size_t bits = 0; bits < (1u << ks.size()); ++bits) {
    WorldModel w{u, {}};
    for (size_t i = 0; i < ks.size(); ++i) w.valuation[ks[i]] = (bits >> i) & 1;
    out.push_back(std::move(w));
  }
  return out;
}

bool equivalent_on(const FormulaPtr& a, const FormulaPtr& b, const Universe& u) {
  FormulaPtr both = f_and({a, b});
  for (const auto& w : all_worlds(both, u))
    if (eval_formula(w, a) != eval_formula(w, b)) return false;
  return true;
}

// random sentence generator for property checks
FormulaPtr random_formula(std::mt19937& rng, int depth, int nvars) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 1);
  std::uniform_int_distribution<int> vpick(0, nvars - 1);
  std::string vars[2] = {"x", "y"};
  switch (pick(rng)) {
    case 0: {
      std::uniform_int_distribution<int> arity(0, 1);
      if (arity(rng) == 0) return f_atom("p", {});
      return f_atom("q", {Term::var(vars[vpick(rng)])});
    }
    case 1: {
      std::uniform_int_distribution<int> c(0, 1);
      return f_eq(Term::var(vars[vpick(rng)]), Term::name(c(rng) ? "a" : "b"));
    }
    case 2: return f_not(random_formula(rng, depth - 1, nvars));
    case 3: return f_and({random_formula(rng, depth - 1, nvars), random_formula(rng, depth - 1, nvars)});
    case 4: return f_or({random_formula(rng, depth - 1, nvars), random_formula(rng, depth - 1, nvars)});
    case 5: return f_forall(vars[vpick(rng)], random_formula(rng, depth - 1, nvars));
    case 6: return f_exists(vars[vpick(rng)], random_formula(rng, depth - 1, nvars));
    default: {
      std::uniform_int_distribution<int> m(0, 2);
      std::uniform_int_distribution<int> kind(0, 1);
      std::string v = vars[vpick(rng)];
      FormulaPtr body = random_formula(rng, depth - 1, nvars);
      return kind(rng) ? f_at_most(m(rng), v, body) : f_at_least(m(rng), v, body);
    }
  }
}

// close a formula by quantifying away its free variables
FormulaPtr close_sentence(FormulaPtr f) {
  for (const auto& v : free_vars(f)) f = f_forall(v, f);
  return f;
}

}  // namespace

TEST_CASE("substitute replaces free occurrences only") {
  CHECK(substitute(Px("x"), "x", "d1")->key() == P("d1")->key());
  FormulaPtr ex = f_exists("x", Px("x"));
  CHECK(substitute(ex, "x", "d1")->key() == ex->key());
  FormulaPtr conj = f_and({Px("x"), f_atom("G", {Term::var("x"), Term::var("y")})});
  FormulaPtr got = substitute(conj, "x", "o1");
  CHECK(got->key() ==
        f_and({P("o1"), f_atom("G", {Term::name("o1"), Term::var("y")})})->key());
}

TEST_CASE("substitute is identity when the variable is not free") {
  FormulaPtr f = f_and({f_forall("x", Px("x")), P("a")});
  CHECK(substitute(f, "x", "b")->key() == f->key());
  CHECK(substitute(P("a"), "z", "b")->key() == P("a")->key());
}

TEST_CASE("to_nnf pushes negation to atoms") {
  FormulaPtr pq = f_not(f_and({f_atom("p", {}), f_atom("q", {})}));
  CHECK(to_nnf(pq)->key() == f_or({f_not(f_atom("p", {})), f_not(f_atom("q", {}))})->key());
  CHECK(to_nnf(f_not(f_forall("x", Px("x"))))->key() ==
        f_exists("x", f_not(Px("x")))->key());
  CHECK(to_nnf(f_not(f_not(f_atom("p", {}))))->key() == f_atom("p", {})->key());
}

TEST_CASE("to_nnf uses counting duals") {
  FormulaPtr f = f_not(f_at_most(2, "x", Px("x")));
  CHECK(to_nnf(f)->key() == f_at_least(3, "x", Px("x"))->key());
  FormulaPtr g = f_not(f_at_least(2, "x", Px("x")));
  CHECK(to_nnf(g)->key() == f_at_most(1, "x", Px("x"))->key());
  CHECK(to_nnf(f_not(f_at_least(0, "x", Px("x"))))->kind == FKind::False);
}

TEST_CASE("check_c2 counts distinct variables and arities") {
  FormulaPtr r2 = f_exists("x", f_exists("y", f_atom("R", {Term::var("x"), Term::var("y")})));
  CHECK(check_c2(r2));
  FormulaPtr r3 = f_exists("x", f_exists("y", f_exists("z",
      f_and({f_atom("R", {Term::var("x"), Term::var("y")}),
             f_atom("R", {Term::var("y"), Term::var("z")})}))));
  CHECK_FALSE(check_c2(r3));
}

TEST_CASE("dishwasher-style initial sentences are two-variable") {
  // dish(x) == (x = d1 or x = d2), closed
  FormulaPtr dish = f_forall("x", f_iff(f_atom("dish", {Term::var("x")}),
      f_or({f_eq(Term::var("x"), Term::name("d1")), f_eq(Term::var("x"), Term::name("d2"))})));
  CHECK(check_c2(dish));
  CHECK(is_sentence(dish));
  FormulaPtr rooms = f_forall("x", f_iff(f_atom("room", {Term::var("x")}),
      f_or({f_eq(Term::var("x"), Term::name("r1")), f_eq(Term::var("x"), Term::name("r2"))})));
  CHECK(check_c2(rooms));
}

TEST_CASE("canonicalize merges duplicates and sorts children") {
  FormulaPtr p = f_atom("p", {});
  FormulaPtr q = f_atom("q", {});
  FormulaPtr f = f_and({p, f_and({q, p})});
  FormulaPtr c = canonicalize(f);
  REQUIRE(c->kind == FKind::And);
  REQUIRE(c->kids.size() == 2);
  CHECK(c->key() == canonicalize(f_and({q, p}))->key());
}

TEST_CASE("canonicalize absorbs complementary pair and units") {
  FormulaPtr p = f_atom("p", {});
  CHECK(canonicalize(f_or({p, f_not(p)}))->kind == FKind::True);
  CHECK(canonicalize(f_and({p, f_false()}))->kind == FKind::False);
  CHECK(canonicalize(f_and({p, f_true()}))->key() == canonicalize(p)->key());
}

TEST_CASE("canonicalize resolves ground equalities by unique names") {
  CHECK(canonicalize(f_eq(Term::name("a"), Term::name("a")))->kind == FKind::True);
  CHECK(canonicalize(f_eq(Term::name("a"), Term::name("b")))->kind == FKind::False);
}

TEST_CASE("canonicalize renames bound variables apart") {
  FormulaPtr a = f_exists("x", Px("x"));
  FormulaPtr b = f_exists("y", Px("y"));
  CHECK(canonicalize(a)->key() == canonicalize(b)->key());
}

TEST_CASE("canonicalize is idempotent on random sentences") {
  std::mt19937 rng(7);
  for (int i = 0; i < 300; ++i) {
    FormulaPtr f = close_sentence(random_formula(rng, 3, 2));
    FormulaPtr c = canonicalize(f);
    CHECK(canonicalize(c)->key() == c->key());
  }
}

TEST_CASE("to_nnf preserves truth under grounded evaluation") {
  std::mt19937 rng(11);
  Universe u{{"a", "b", "c", "d"}};
  for (int i = 0; i < 120; ++i) {
    FormulaPtr f = close_sentence(random_formula(rng, 2, 2));
    CHECK(equivalent_on(f, to_nnf(f), u));
  }
}

TEST_CASE("canonical equality implies grounded equivalence") {
  std::mt19937 rng(13);
  Universe u{{"a", "b", "c"}};
  std::map<std::string, FormulaPtr> seen;
  for (int i = 0; i < 200; ++i) {
    FormulaPtr f = close_sentence(random_formula(rng, 2, 2));
    FormulaPtr c = canonicalize(f);
    // canonicalization itself must preserve truth
    CHECK(equivalent_on(f, c, u));
    auto [it, fresh] = seen.emplace(c->key(), f);
    if (!fresh) CHECK(equivalent_on(f, it->second, u));
  }
}

TEST_CASE("arity above two is rejected") {
  CHECK_THROWS_AS(f_atom("F", {Term::name("a"), Term::name("b"), Term::name("c")}), InputError);
}
