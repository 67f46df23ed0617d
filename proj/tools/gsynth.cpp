#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "gsynth/frontend.hpp"
#include "gsynth/oracle.hpp"

using namespace gsynth;

namespace {

// Exit codes: 0 success / property holds, 1 unrealizable / violated,
// 2 input error, 3 resource cap exceeded.
constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;
constexpr int kResource = 3;

struct Options {
  std::string file;
  std::string out;  // empty = stdout
  int padding = 1;
  size_t max_states = 20000;
  size_t max_hypothesis_states = 20;
  bool semantic_dedup = false;
  bool stats = false;
  unsigned seed = 0;
  bool dot = false;
  bool json = true;
  size_t depth = 4;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InputError("cannot write file: " + o.out);
  f << text;
}

ArenaOptions arena_options(const Options& o, bool expand_empty) {
  return {.max_states = o.max_states,
          .semantic_dedup = o.semantic_dedup,
          .expand_empty = expand_empty};
}

void print_stats(const Arena& a, const SynthesisReport* rep, double secs) {
  std::cerr << "Nodes (TS)\tEdges (TS)\tNodes (St)\tEdges (St)\tTime [s]\n"
            << a.states.size() << "\t" << a.transitions.size() << "\t"
            << (rep && rep->realizable ? std::to_string(rep->strategy_states) : "--") << "\t"
            << (rep && rep->realizable ? std::to_string(rep->strategy_edges) : "--") << "\t"
            << secs << "\n"
            << "contexts: " << a.contexts.size() << ", splits: " << a.splits
            << ", discarded contexts: " << a.discarded_contexts << "\n";
}

int cmd_synth(const Options& o) {
  auto t0 = std::chrono::steady_clock::now();
  Problem pr = load_problem(slurp(o.file), o.padding);
  Arena a = build_arena(pr.bat, pr.delta, pr.phi, arena_options(o, false));
  Game g = to_game(a, pr.bat);
  SynthesisReport rep = synthesize(g, o.max_hypothesis_states);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.stats) print_stats(a, &rep, secs);
  if (!rep.realizable) {
    std::cerr << "unrealizable: no winning terminating strategy exists\n";
    return kNegative;
  }
  write_out(o, o.dot ? emit_dot(a, pr.bat, &rep.strategy)
                     : emit_json(a, pr.bat, &rep.strategy, &rep, secs));
  return kOk;
}

int cmd_verify(const Options& o) {
  auto t0 = std::chrono::steady_clock::now();
  Problem pr = load_problem(slurp(o.file), o.padding);
  Arena a = build_arena(pr.bat, pr.delta, pr.phi, arena_options(o, true));
  VerifyResult r = verify(a);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.stats) print_stats(a, nullptr, secs);
  if (r.ok) {
    std::cerr << "property holds on all terminating executions\n";
    return kOk;
  }
  std::cerr << "property violated; counterexample trace:\n";
  for (size_t i = 0; i < r.path_actions.size(); ++i)
    std::cerr << "  " << r.path_actions[i].str() << "\n";
  if (r.path_actions.empty()) std::cerr << "  (empty trace)\n";
  return kNegative;
}

int cmd_arena(const Options& o) {
  auto t0 = std::chrono::steady_clock::now();
  Problem pr = load_problem(slurp(o.file), o.padding);
  Arena a = build_arena(pr.bat, pr.delta, pr.phi, arena_options(o, false));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.stats) print_stats(a, nullptr, secs);
  write_out(o, o.dot ? emit_dot(a, pr.bat) : emit_json(a, pr.bat, nullptr, nullptr, secs));
  return kOk;
}

// Differential mode: replay the transition system against the step-by-step
// progression semantics on sampled models of the initial theory.
int cmd_check(const Options& o) {
  Problem pr = load_problem(slurp(o.file), o.padding);
  Arena a = build_arena(pr.bat, pr.delta, pr.phi, arena_options(o, true));

  // pin every ground atom the initial theory decides; sample the rest
  GroundReasoner reasoner(pr.bat.d0.universe);
  std::vector<std::string> open_atoms;
  WorldModel base{pr.bat.d0.universe, {}};
  for (const auto& [fname, ar] : pr.bat.fluent_arity) {
    for (const auto& args : arg_tuples(base.universe, ar)) {
      std::vector<Term> terms;
      for (const auto& x : args) terms.push_back(Term::name(x));
      switch (reasoner.decide(pr.bat.d0.sentences, f_atom(fname, terms))) {
        case Verdict::Entailed: base.valuation[ground_atom_key(fname, args)] = true; break;
        case Verdict::Refuted: base.valuation[ground_atom_key(fname, args)] = false; break;
        case Verdict::Open: open_atoms.push_back(ground_atom_key(fname, args)); break;
      }
    }
  }
  std::mt19937 rng(o.seed);
  std::vector<WorldModel> worlds;
  std::set<std::string> seen;
  auto consistent = [&](const WorldModel& w) {
    for (const auto& s : pr.bat.d0.sentences)
      if (!eval_formula(w, s)) return false;
    return true;
  };
  if (open_atoms.empty()) {
    worlds.push_back(base);
  } else {
    std::uniform_int_distribution<int> coin(0, 1);
    for (int attempt = 0; attempt < 2000 && worlds.size() < 32; ++attempt) {
      WorldModel w = base;
      std::string sig;
      for (const auto& atom : open_atoms) {
        bool v = coin(rng);
        w.valuation[atom] = v;
        sig += v ? '1' : '0';
      }
      if (consistent(w) && seen.insert(sig).second) worlds.push_back(std::move(w));
    }
    if (worlds.empty()) throw ResourceError("could not sample a model of the initial theory");
  }

  size_t mismatches = 0, traces = 0;
  for (const auto& w : worlds) {
    int ctx = -1;
    for (size_t c = 0; c < a.contexts.size() && ctx < 0; ++c) {
      bool all = true;
      for (const auto& j : a.contexts[c]) all = all && eval_formula(w, j);
      if (all) ctx = static_cast<int>(c);
    }
    if (ctx < 0) {
      std::cerr << "mismatch: no context covers a sampled model\n";
      ++mismatches;
      continue;
    }
    // reachable arena paths up to the depth bound
    std::map<std::string, bool> arena_final;
    struct Node {
      int s;
      Trace z;
    };
    std::deque<Node> q{{a.initials[ctx], Trace{}}};
    while (!q.empty()) {
      auto [s, z] = q.front();
      q.pop_front();
      arena_final[z.str()] = a.states[s].final_state;
      if (z.size() >= o.depth) continue;
      for (int t : a.out[s])
        q.push_back({a.transitions[t].dst, z.append(a.transitions[t].action)});
    }
    for (const auto& e : enumerate_executions(pr.bat, w, pr.delta, o.depth)) {
      ++traces;
      auto it = arena_final.find(e.trace.str());
      if (it == arena_final.end() || it->second != e.terminating) {
        std::cerr << "mismatch on trace [" << e.trace.str() << "]\n";
        ++mismatches;
      }
    }
    for (const auto& [z, fin] : arena_final) {
      (void)fin;
      bool found = false;
      for (const auto& e : enumerate_executions(pr.bat, w, pr.delta, o.depth))
        found = found || e.trace.str() == z;
      if (!found) {
        std::cerr << "arena-only trace [" << z << "]\n";
        ++mismatches;
      }
    }
  }
  std::cerr << "checked " << worlds.size() << " model(s), " << traces << " trace(s), "
            << mismatches << " mismatch(es)\n";
  return mismatches == 0 ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy synthesis for agent programs with temporal goals"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", o.file, "problem file (.gl)")->required();
    cmd->add_option("--universe-padding", o.padding, "anonymous objects added to the universe");
    cmd->add_option("--max-states", o.max_states, "transition-system state cap");
    cmd->add_option("--max-hypothesis-states", o.max_hypothesis_states,
                    "cap for exhaustive hypothesis enumeration");
    cmd->add_flag("--semantic-dedup", o.semantic_dedup, "drop semantically vacuous effects");
    cmd->add_flag("--stats", o.stats, "print size and timing statistics to stderr");
    cmd->add_option("--seed", o.seed, "random seed for the differential check sampler");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize a winning strategy");
  add_common(synth);
  synth->add_option("-o,--out", o.out, "output path (default: stdout)");
  synth->add_flag("--dot", o.dot, "emit DOT instead of JSON");

  CLI::App* verify_cmd = app.add_subcommand("verify", "check the specification on all executions");
  add_common(verify_cmd);

  CLI::App* arena_cmd = app.add_subcommand("arena", "emit the transition system");
  add_common(arena_cmd);
  arena_cmd->add_option("-o,--out", o.out, "output path (default: stdout)");
  arena_cmd->add_flag("--dot", o.dot, "emit DOT instead of JSON");
  arena_cmd->add_flag("--json", o.json, "emit JSON (default)");

  CLI::App* check = app.add_subcommand("check", "differential test against step semantics");
  add_common(check);
  check->add_option("--depth", o.depth, "trace length bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (verify_cmd->parsed()) return cmd_verify(o);
    if (arena_cmd->parsed()) return cmd_arena(o);
    if (check->parsed()) return cmd_check(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  }
  return kInputError;
}
