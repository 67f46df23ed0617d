#ifndef GSYNTH_FRONTEND_HPP
#define GSYNTH_FRONTEND_HPP

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arena.hpp"
#include "bat.hpp"
#include "ltlf.hpp"
#include "program.hpp"
#include "synthesis.hpp"

// Problem-file format: a `golog-synth v1` header followed by S-expression
// sections (objects, fluents, init, poss, ssa, env, program, spec).

namespace gsynth {

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> kids;
  int line = 0, col = 0;

  const SExpr& at(size_t i, const std::string& what) const {
    if (i >= kids.size())
      throw InputError(pos() + ": expected " + what + " in " + str());
    return kids[i];
  }
  std::string pos() const {
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
  }
  const std::string& head() const {
    static const std::string empty;
    if (is_atom) return atom;
    if (kids.empty() || !kids[0].is_atom) return empty;
    return kids[0].atom;
  }
  std::string str() const {
    if (is_atom) return atom;
    std::string s = "(";
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ' ';
      s += kids[i].str();
    }
    return s + ")";
  }
};

namespace detail {

struct SReader {
  const std::string& text;
  size_t i = 0;
  int line = 1, col = 1;

  void advance() {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }
  void skip_space() {
    while (i < text.size()) {
      if (text[i] == ';') {
        while (i < text.size() && text[i] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(text[i]))) {
        advance();
      } else {
        break;
      }
    }
  }
  bool eof() {
    skip_space();
    return i >= text.size();
  }
  SExpr read() {
    skip_space();
    if (i >= text.size())
      throw InputError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                       ": unexpected end of input");
    SExpr e;
    e.line = line;
    e.col = col;
    if (text[i] == '(') {
      advance();
      while (true) {
        skip_space();
        if (i >= text.size())
          throw InputError(e.pos() + ": unclosed parenthesis");
        if (text[i] == ')') {
          advance();
          return e;
        }
        e.kids.push_back(read());
      }
    }
    if (text[i] == ')')
      throw InputError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                       ": unexpected ')'");
    e.is_atom = true;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')' && text[i] != ';') {
      e.atom += text[i];
      advance();
    }
    return e;
  }
};

}  // namespace detail

struct ProblemFile {
  std::vector<SExpr> forms;  // all top-level sections, in file order

  std::vector<std::string> objects;
  std::map<std::string, int> fluents;
  std::vector<SExpr> init;
  std::map<std::string, std::pair<std::vector<std::string>, SExpr>> poss;  // fn -> formals, rhs
  std::vector<SExpr> ssas;
  std::set<std::string> env_functions;
  std::optional<SExpr> program;
  std::optional<SExpr> spec;

  static ProblemFile parse(const std::string& text);
};

inline std::string print_problem(const ProblemFile& p) {
  std::string out = "golog-synth v1\n\n";
  for (const auto& f : p.forms) out += f.str() + "\n";
  return out;
}

inline ProblemFile ProblemFile::parse(const std::string& text) {
  size_t nl = text.find('\n');
  std::string header = text.substr(0, nl == std::string::npos ? text.size() : nl);
  while (!header.empty() && (header.back() == '\r' || header.back() == ' ')) header.pop_back();
  if (header != "golog-synth v1")
    throw InputError("line 1: expected header 'golog-synth v1', got '" + header + "'");

  std::string body = nl == std::string::npos ? "" : text.substr(nl + 1);
  detail::SReader r{body};
  r.line = 2;
  ProblemFile p;
  while (!r.eof()) p.forms.push_back(r.read());

  for (const auto& f : p.forms) {
    const std::string& h = f.head();
    if (f.is_atom || f.kids.empty() || !f.kids[0].is_atom)
      throw InputError(f.pos() + ": expected a (section ...) form");
    if (h == "objects") {
      for (size_t i = 1; i < f.kids.size(); ++i) p.objects.push_back(f.at(i, "object").atom);
    } else if (h == "fluents") {
      for (size_t i = 1; i < f.kids.size(); ++i) {
        const SExpr& d = f.kids[i];
        if (d.kids.size() != 2 || !d.kids[0].is_atom || !d.kids[1].is_atom)
          throw InputError(d.pos() + ": expected (name arity)");
        int arity = std::stoi(d.kids[1].atom);
        if (arity < 0 || arity > 2)
          throw InputError(d.pos() + ": fluent arity must be 0, 1, or 2");
        p.fluents[d.kids[0].atom] = arity;
      }
    } else if (h == "init") {
      for (size_t i = 1; i < f.kids.size(); ++i) p.init.push_back(f.kids[i]);
    } else if (h == "poss") {
      const SExpr& head = f.at(1, "action pattern");
      if (head.is_atom || head.kids.empty())
        throw InputError(f.pos() + ": expected (poss (fn vars...) formula)");
      std::vector<std::string> formals;
      for (size_t i = 1; i < head.kids.size(); ++i) formals.push_back(head.kids[i].atom);
      p.poss[head.kids[0].atom] = {formals, f.at(2, "precondition formula")};
    } else if (h == "ssa") {
      p.ssas.push_back(f);
    } else if (h == "env") {
      for (size_t i = 1; i < f.kids.size(); ++i) p.env_functions.insert(f.kids[i].atom);
    } else if (h == "program") {
      p.program = f.at(1, "program body");
    } else if (h == "spec") {
      p.spec = f.at(1, "specification body");
    } else {
      throw InputError(f.pos() + ": unknown section '" + h + "'");
    }
  }
  if (!p.program) throw InputError("missing (program ...) section");
  if (!p.spec) throw InputError("missing (spec ...) section");
  if (p.fluents.empty()) throw InputError("missing (fluents ...) section");
  return p;
}

// The fully desugared inputs ready for arena construction.
struct Problem {
  BatModel bat;
  ProgramPtr delta;
  TemporalPtr spec_nnf;  // the specification in negation normal form
  TemporalPtr phi;       // tnf(spec_nnf), the formula the arena tracks
};

namespace detail {

class Desugarer {
 public:
  Desugarer(const ProblemFile& p, int padding) : p_(p) {
    objects_ = {p.objects.begin(), p.objects.end()};
    universe_ = Universe::with_padding(p.objects, padding);
  }

  Problem run() {
    Problem out;
    std::vector<FormulaPtr> init;
    for (const auto& s : p_.init) init.push_back(formula(s, {}, {}));
    out.bat.d0 = TheoryHandle::make(init, universe_);
    out.bat.fluent_arity = p_.fluents;
    for (const auto& s : p_.ssas) out.bat.ssas.emplace(ssa_fluent(s), ssa(s));
    out.bat.ensure_ssas();

    out.delta = program(*p_.program, {});
    collect_actions(out.delta, out.bat);
    for (const auto& a : out.bat.actions)
      if (p_.env_functions.count(a.fn)) out.bat.env_actions.insert(a.str());
    for (const auto& fn : p_.env_functions) {
      bool found = false;
      for (const auto& a : out.bat.actions) found = found || a.fn == fn;
      if (!found)
        throw InputError("environment function '" + fn + "' does not occur in the program");
    }
    out.bat.validate();

    out.spec_nnf = t_nnf(temporal(*p_.spec));
    out.phi = tnf(out.spec_nnf);
    return out;
  }

 private:
  using Env = std::map<std::string, std::string>;  // sugar variable -> object

  [[noreturn]] void fail(const SExpr& e, const std::string& msg) const {
    throw InputError(e.pos() + ": " + msg + " in " + e.str());
  }

  Term term(const SExpr& e, const Env& env, const std::set<std::string>& bound) const {
    if (!e.is_atom) fail(e, "expected a term");
    auto it = env.find(e.atom);
    if (it != env.end()) return Term::name(it->second);
    if (bound.count(e.atom)) return Term::var(e.atom);
    if (objects_.count(e.atom)) return Term::name(e.atom);
    fail(e, "undeclared symbol '" + e.atom + "'");
  }

  FormulaPtr formula(const SExpr& e, const Env& env, std::set<std::string> bound) const {
    if (e.is_atom) {
      if (e.atom == "true") return f_true();
      if (e.atom == "false") return f_false();
      auto f = p_.fluents.find(e.atom);
      if (f != p_.fluents.end() && f->second == 0) return f_atom(e.atom, {});
      fail(e, "undeclared symbol '" + e.atom + "'");
    }
    const std::string& h = e.head();
    auto rest = [&](size_t from) {
      std::vector<FormulaPtr> ks;
      for (size_t i = from; i < e.kids.size(); ++i) ks.push_back(formula(e.kids[i], env, bound));
      return ks;
    };
    if (h == "and") return f_and(rest(1));
    if (h == "or") return f_or(rest(1));
    if (h == "not") return f_not(formula(e.at(1, "formula"), env, bound));
    if (h == "implies")
      return f_implies(formula(e.at(1, "formula"), env, bound),
                       formula(e.at(2, "formula"), env, bound));
    if (h == "iff")
      return f_iff(formula(e.at(1, "formula"), env, bound),
                   formula(e.at(2, "formula"), env, bound));
    if (h == "forall" || h == "exists") {
      const std::string& v = e.at(1, "variable").atom;
      bound.insert(v);
      FormulaPtr body = formula(e.at(2, "formula"), env, bound);
      return h == "forall" ? f_forall(v, body) : f_exists(v, body);
    }
    if (h == "atmost" || h == "atleast") {
      int m = std::stoi(e.at(1, "count").atom);
      const std::string& v = e.at(2, "variable").atom;
      bound.insert(v);
      FormulaPtr body = formula(e.at(3, "formula"), env, bound);
      return h == "atmost" ? f_at_most(m, v, body) : f_at_least(m, v, body);
    }
    if (h == "=")
      return f_eq(term(e.at(1, "term"), env, bound), term(e.at(2, "term"), env, bound));
    auto f = p_.fluents.find(h);
    if (f == p_.fluents.end()) fail(e, "undeclared fluent '" + h + "'");
    if (static_cast<int>(e.kids.size()) - 1 != f->second)
      fail(e, "fluent '" + h + "' expects " + std::to_string(f->second) + " arguments");
    std::vector<Term> args;
    for (size_t i = 1; i < e.kids.size(); ++i) args.push_back(term(e.kids[i], env, bound));
    return f_atom(h, args);
  }

  FormulaPtr sentence(const SExpr& e, const Env& env) const {
    FormulaPtr f = formula(e, env, {});
    if (!check_c2(f)) fail(e, "formula is outside the two-variable counting fragment");
    if (!is_sentence(f)) fail(e, "formula is not a sentence");
    return f;
  }

  std::string ssa_fluent(const SExpr& s) const {
    const SExpr& head = s.at(1, "fluent pattern");
    if (head.is_atom || head.kids.empty()) fail(s, "expected (ssa (F x [y]) ...)");
    return head.kids[0].atom;
  }

  SSA ssa(const SExpr& s) const {
    const SExpr& head = s.at(1, "fluent pattern");
    const std::string& fname = head.kids[0].atom;
    auto decl = p_.fluents.find(fname);
    if (decl == p_.fluents.end()) fail(head, "SSA for undeclared fluent '" + fname + "'");
    SSA out{fname, decl->second, {}, {}};
    // the declared formal argument names are normalized to x, y
    std::map<std::string, std::string> formal_map;
    for (size_t i = 1; i < head.kids.size(); ++i)
      formal_map[head.kids[i].atom] = fluent_formals()[i - 1];
    if (static_cast<int>(head.kids.size()) - 1 != decl->second)
      fail(head, "SSA arity mismatch for '" + fname + "'");
    for (size_t i = 2; i < s.kids.size(); ++i) {
      const SExpr& part = s.kids[i];
      const std::string& sign = part.head();
      if (sign != "pos" && sign != "neg") fail(part, "expected (pos ...) or (neg ...)");
      const SExpr& act = part.at(1, "action pattern");
      if (act.is_atom || act.kids.empty()) fail(act, "expected (fn vars...)");
      EffectPair pair;
      pair.action_fn = act.kids[0].atom;
      std::set<std::string> free;
      for (const auto& [from, to] : formal_map) free.insert(to);
      for (size_t k = 1; k < act.kids.size(); ++k) {
        pair.action_vars.push_back(act.kids[k].atom);
        free.insert(act.kids[k].atom);
      }
      pair.eps = rename_formals(open_formula(part.at(2, "effect descriptor"), free), formal_map);
      if (part.kids.size() > 3)
        pair.kappa = open_formula(part.at(3, "context condition"),
                                  {pair.action_vars.begin(), pair.action_vars.end()});
      (sign == "pos" ? out.pos : out.neg).push_back(std::move(pair));
    }
    return out;
  }

  // Effect descriptors and context conditions keep their action-pattern
  // variables free; those become constants at instantiation time, so the
  // two-variable check does not apply here.
  FormulaPtr open_formula(const SExpr& e, const std::set<std::string>& free) const {
    return formula(e, {}, free);
  }

  FormulaPtr rename_formals(FormulaPtr f, const std::map<std::string, std::string>& m) const {
    for (const auto& [from, to] : m)
      if (from != to) f = substitute_var(f, from, Term::var(to));
    return f;
  }

  ActionTerm action(const SExpr& e, const Env& env) const {
    ActionTerm a;
    a.fn = e.kids[0].atom;
    for (size_t i = 1; i < e.kids.size(); ++i) {
      const SExpr& arg = e.kids[i];
      auto it = env.find(arg.atom);
      if (it != env.end())
        a.args.push_back(it->second);
      else if (objects_.count(arg.atom))
        a.args.push_back(arg.atom);
      else
        fail(arg, "unbound sugar variable '" + arg.atom + "'");
    }
    return a;
  }

  ProgramPtr poss_test(const SExpr& e, const ActionTerm& a) const {
    auto it = p_.poss.find(a.fn);
    if (it == p_.poss.end()) fail(e, "no precondition axiom for '" + a.fn + "'");
    const auto& [formals, rhs] = it->second;
    if (formals.size() != a.args.size()) fail(e, "precondition arity mismatch for '" + a.fn + "'");
    Env env;
    for (size_t i = 0; i < formals.size(); ++i) env[formals[i]] = a.args[i];
    return p_test(sentence(rhs, env));
  }

  ProgramPtr program(const SExpr& e, const Env& env) const {
    if (e.is_atom) {
      if (e.atom == "nil") return p_nil();
      fail(e, "expected a program");
    }
    const std::string& h = e.head();
    auto fold = [&](size_t from, ProgramPtr (*join)(ProgramPtr, ProgramPtr)) {
      if (e.kids.size() < from + 1) fail(e, "expected at least one operand");
      ProgramPtr acc = program(e.kids[from], env);
      for (size_t i = from + 1; i < e.kids.size(); ++i) acc = join(acc, program(e.kids[i], env));
      return acc;
    };
    if (h == "seq") return fold(1, p_seq);
    if (h == "choice") return fold(1, p_choice);
    if (h == "conc") return fold(1, p_conc);
    if (h == "star") return p_star(program(e.at(1, "program"), env));
    if (h == "loop") return p_star(program(e.at(1, "program"), env));
    if (h == "opt") return p_choice(program(e.at(1, "program"), env), p_nil());
    if (h == "test") return p_test(sentence(e.at(1, "formula"), env));
    if (h == "while") {
      FormulaPtr cond = sentence(e.at(1, "formula"), env);
      ProgramPtr body = program(e.at(2, "program"), env);
      return p_seq(p_star(p_seq(p_test(cond), body)), p_test(to_nnf(f_not(cond))));
    }
    if (h == "pick") {
      const std::string& v = e.at(1, "variable").atom;
      const SExpr& domain = e.at(2, "domain");
      if (domain.is_atom || domain.kids.empty()) fail(domain, "pick over an empty set");
      const SExpr& body = e.at(3, "program");
      ProgramPtr acc;
      for (const auto& o : domain.kids) {
        if (!objects_.count(o.atom)) fail(o, "undeclared object '" + o.atom + "'");
        Env inner = env;
        inner[v] = o.atom;
        ProgramPtr branch = program(body, inner);
        acc = acc ? p_choice(std::move(acc), std::move(branch)) : std::move(branch);
      }
      return acc;
    }
    if (h == "pact") {
      ActionTerm a = action(e.at(1, "action"), env);
      return p_seq(poss_test(e, a), p_action(a));
    }
    // plain action application
    if (e.kids.empty() || !e.kids[0].is_atom) fail(e, "expected a program");
    return p_action(action(e, env));
  }

  TemporalPtr temporal(const SExpr& e) const {
    if (!e.is_atom) {
      const std::string& h = e.head();
      auto sub = [&](size_t i) { return temporal(e.at(i, "temporal formula")); };
      if (h == "next") return t_next(sub(1));
      if (h == "wnext") return t_wnext(sub(1));
      if (h == "until") return t_until(sub(1), sub(2));
      if (h == "release") return t_release(sub(1), sub(2));
      if (h == "finally") return t_finally(sub(1));
      if (h == "globally") return t_globally(sub(1));
      if (h == "and") return t_and(sub(1), sub(2));
      if (h == "or") return t_or(sub(1), sub(2));
      if (h == "not") return t_not(sub(1));
    } else {
      if (e.atom == "tail") return t_tail();
      if (e.atom == "true") return t_true();
      if (e.atom == "false") return t_false();
    }
    return t_fluent(sentence(e, {}));
  }

  void collect_actions(const ProgramPtr& d, BatModel& bat) const {
    std::set<std::string> seen;
    std::vector<const ProgramExpr*> stack{d.get()};
    while (!stack.empty()) {
      const ProgramExpr* p = stack.back();
      stack.pop_back();
      if (p->kind == PKind::Action && seen.insert(p->action.str()).second)
        bat.actions.push_back(p->action);
      for (const auto& k : p->kids) stack.push_back(k.get());
    }
    if (bat.actions.empty()) throw InputError("program contains no actions");
  }

  const ProblemFile& p_;
  std::set<std::string> objects_;
  Universe universe_;
};

}  // namespace detail

inline Problem desugar(const ProblemFile& p, int universe_padding = 1) {
  return detail::Desugarer(p, universe_padding).run();
}

inline Problem load_problem(const std::string& text, int universe_padding = 1) {
  return desugar(ProblemFile::parse(text), universe_padding);
}

// ---- serialization ----

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string emit_json(const Arena& arena, const BatModel& bat, const Strategy* sigma,
                             const SynthesisReport* rep = nullptr, double wall_seconds = 0) {
  std::ostringstream o;
  o << "{\n  \"states\": [";
  for (size_t i = 0; i < arena.states.size(); ++i) {
    const auto& s = arena.states[i];
    o << (i ? ",\n    " : "\n    ") << "{\"id\": " << i << ", \"rho\": \""
      << detail::json_escape(arena.graph.nodes[s.rho]->str()) << "\", \"final\": "
      << (s.final_state ? "true" : "false")
      << ", \"accepting\": " << (s.accepting ? "true" : "false") << ", \"effects\": [";
    for (size_t k = 0; k < s.E.literals.size(); ++k)
      o << (k ? ", " : "") << "\"" << detail::json_escape(s.E.literals[k].key()) << "\"";
    o << "], \"judgments\": [";
    const auto& js = arena.contexts[s.context];
    for (size_t k = 0; k < js.size(); ++k)
      o << (k ? ", " : "") << "\"" << detail::json_escape(js[k]->key()) << "\"";
    o << "]}";
  }
  o << "\n  ],\n  \"initials\": [";
  for (size_t i = 0; i < arena.initials.size(); ++i) o << (i ? ", " : "") << arena.initials[i];
  o << "],\n  \"transitions\": [";
  for (size_t i = 0; i < arena.transitions.size(); ++i) {
    const auto& t = arena.transitions[i];
    o << (i ? ",\n    " : "\n    ") << "{\"src\": " << t.src << ", \"action\": \""
      << detail::json_escape(t.action.str()) << "\", \"dst\": " << t.dst
      << ", \"env\": " << (bat.is_env(t.action) ? "true" : "false") << "}";
  }
  o << "\n  ]";
  if (sigma) {
    o << ",\n  \"strategy\": {";
    bool first = true;
    for (const auto& [s, u] : sigma->choices) {
      o << (first ? "" : ", ") << "\"" << s << "\": [";
      for (size_t k = 0; k < u.size(); ++k)
        o << (k ? ", " : "") << "\"" << detail::json_escape(u[k].str()) << "\"";
      o << "]";
      first = false;
    }
    o << "}";
  }
  o << ",\n  \"meta\": {\"arena_states\": " << arena.states.size()
    << ", \"arena_transitions\": " << arena.transitions.size()
    << ", \"contexts\": " << arena.contexts.size() << ", \"splits\": " << arena.splits;
  if (rep)
    o << ", \"strategy_states\": " << rep->strategy_states
      << ", \"strategy_edges\": " << rep->strategy_edges
      << ", \"hypotheses_tried\": " << rep->hypotheses_tried;
  o << ", \"wall_seconds\": " << wall_seconds << "}\n}\n";
  return o.str();
}

inline std::string emit_dot(const Arena& arena, const BatModel& bat,
                            const Strategy* sigma = nullptr) {
  std::ostringstream o;
  o << "digraph arena {\n  rankdir=LR;\n";
  std::set<int> inits(arena.initials.begin(), arena.initials.end());
  for (size_t i = 0; i < arena.states.size(); ++i) {
    const auto& s = arena.states[i];
    o << "  s" << i << " [label=\"" << i << "\"";
    if (s.final_state) o << ", shape=doublecircle";
    if (s.accepting) o << ", style=filled, fillcolor=lightgrey";
    if (inits.count(static_cast<int>(i))) o << ", penwidth=2";
    o << "];\n";
  }
  for (const auto& t : arena.transitions) {
    bool chosen = sigma && sigma->defined(t.src) && sigma->chooses(t.src, t.action);
    o << "  s" << t.src << " -> s" << t.dst << " [label=\"" << t.action.str() << "\"";
    if (bat.is_env(t.action)) o << ", style=dashed";
    if (chosen) o << ", penwidth=3";
    o << "];\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace gsynth

#endif
