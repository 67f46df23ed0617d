#ifndef GSYNTH_REASONER_HPP
#define GSYNTH_REASONER_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "formula.hpp"
#include "sat.hpp"
#include "world.hpp"

namespace gsynth {

enum class Verdict { Entailed, Refuted, Open };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Entailed: return "entailed";
    case Verdict::Refuted: return "refuted";
    case Verdict::Open: return "open";
  }
  return "?";
}

// A finite set of C2-fluent sentences over a declared finite universe.
struct TheoryHandle {
  std::vector<FormulaPtr> sentences;
  Universe universe;

  static TheoryHandle make(std::vector<FormulaPtr> sents, Universe u) {
    TheoryHandle th;
    th.universe = std::move(u);
    for (auto& s : sents) {
      if (!is_sentence(s)) throw InputError("theory member is not a sentence: " + s->key());
      if (!check_c2(s)) throw InputError("theory member is not C2: " + s->key());
      th.sentences.push_back(canonicalize(s));
    }
    return th;
  }
};

namespace detail {

inline FormulaPtr ground_at_least(const std::vector<FormulaPtr>& items, size_t i, int j,
                                  std::map<std::pair<size_t, int>, FormulaPtr>& memo) {
  if (j <= 0) return f_true();
  if (static_cast<int>(items.size() - i) < j) return f_false();
  auto it = memo.find({i, j});
  if (it != memo.end()) return it->second;
  FormulaPtr with = f_and({items[i], ground_at_least(items, i + 1, j - 1, memo)});
  FormulaPtr without = ground_at_least(items, i + 1, j, memo);
  FormulaPtr r = f_or({with, without});
  memo[{i, j}] = r;
  return r;
}

}  // namespace detail

// Expand quantifiers over the finite universe; the result is quantifier-free
// over ground atoms. Counting quantifiers become threshold circuits over the
// instantiations (shared subterms, so the encoding stays linear in m*n).
inline FormulaPtr ground(const FormulaPtr& f, const Universe& u) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::Atom:
    case FKind::Eq:
      return f;
    case FKind::Not:
      return f_not(ground(f->kids[0], u));
    case FKind::And:
    case FKind::Or: {
      std::vector<FormulaPtr> ks;
      for (const auto& k : f->kids) ks.push_back(ground(k, u));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::Forall:
    case FKind::Exists: {
      std::vector<FormulaPtr> ks;
      for (const auto& n : u.objects) ks.push_back(ground(substitute(f->kids[0], f->var, n), u));
      return f->kind == FKind::Forall ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::CountLeq:
    case FKind::CountGeq: {
      std::vector<FormulaPtr> items;
      for (const auto& n : u.objects) items.push_back(ground(substitute(f->kids[0], f->var, n), u));
      std::map<std::pair<size_t, int>, FormulaPtr> memo;
      if (f->kind == FKind::CountGeq) return detail::ground_at_least(items, 0, f->count, memo);
      return f_not(detail::ground_at_least(items, 0, f->count + 1, memo));
    }
  }
  return f;
}

namespace detail {

// Tseitin encoding over the grounded formula DAG; node identity is pointer
// identity, so shared counting subterms are encoded once.
class Encoder {
 public:
  explicit Encoder(sat::Solver& s) : solver_(s) {}

  int atom_var(const std::string& key) {
    auto it = atom_vars_.find(key);
    if (it != atom_vars_.end()) return it->second;
    int v = solver_.new_var();
    atom_vars_.emplace(key, v);
    return v;
  }

  sat::Lit encode(const FormulaPtr& f) {
    // Node identity is pointer identity, so every encoded tree must stay
    // alive for the encoder's lifetime or freed addresses could be reused
    // by later trees and alias stale cache entries.
    roots_.push_back(f);
    return encode_rec(f);
  }

  const std::map<std::string, int>& atoms() const { return atom_vars_; }

 private:
  sat::Lit encode_rec(const FormulaPtr& f) {
    auto it = node_vars_.find(f.get());
    if (it != node_vars_.end()) return it->second;
    sat::Lit lit = 0;
    switch (f->kind) {
      case FKind::True: {
        int v = solver_.new_var();
        solver_.add_clause({v});
        lit = v;
        break;
      }
      case FKind::False: {
        int v = solver_.new_var();
        solver_.add_clause({-v});
        lit = v;
        break;
      }
      case FKind::Atom: {
        std::vector<std::string> args;
        for (const auto& t : f->terms) {
          if (t.is_var) throw InputError("non-ground atom in SAT encoding: " + f->key());
          args.push_back(t.text);
        }
        lit = atom_var(ground_atom_key(f->pred, args));
        break;
      }
      case FKind::Eq:
        if (f->terms[0].is_var || f->terms[1].is_var)
          throw InputError("non-ground equality in SAT encoding");
        return encode_rec(f->terms[0].text == f->terms[1].text ? f_true() : f_false());
      case FKind::Not:
        lit = -encode_rec(f->kids[0]);
        break;
      case FKind::And:
      case FKind::Or: {
        std::vector<sat::Lit> kids;
        for (const auto& k : f->kids) kids.push_back(encode_rec(k));
        int v = solver_.new_var();
        if (f->kind == FKind::And) {
          sat::Clause big{v};
          for (sat::Lit k : kids) {
            solver_.add_clause({-v, k});
            big.push_back(-k);
          }
          solver_.add_clause(big);
        } else {
          sat::Clause big{-v};
          for (sat::Lit k : kids) {
            solver_.add_clause({v, -k});
            big.push_back(k);
          }
          solver_.add_clause(big);
        }
        lit = v;
        break;
      }
      default:
        throw InputError("quantifier reached SAT encoding (formula not grounded)");
    }
    node_vars_.emplace(f.get(), lit);
    return lit;
  }

  std::vector<FormulaPtr> roots_;
  sat::Solver& solver_;
  std::map<std::string, int> atom_vars_;
  std::unordered_map<const Formula*, sat::Lit> node_vars_;
};

}  // namespace detail

// Optional external-prover adapter. A backend answers satisfiability of a
// sentence set; `unknown` maps to Verdict::Open at the call sites.
class ProverBackend {
 public:
  virtual ~ProverBackend() = default;
  enum class Answer { Sat, Unsat, Unknown };
  virtual Answer satisfiable(const std::vector<FormulaPtr>& sentences) = 0;
};

// Decides entailment and consistency by grounding over the finite universe
// and calling the SAT core. Queries are memoized on canonical forms.
class GroundReasoner {
 public:
  explicit GroundReasoner(Universe u) : universe_(std::move(u)) {}

  const Universe& universe() const { return universe_; }

  bool consistent(const std::vector<FormulaPtr>& sentences) const {
    std::vector<FormulaPtr> canon;
    std::string key;
    std::vector<std::string> keys;
    for (const auto& s : sentences) {
      FormulaPtr c = canonicalize(s);
      if (c->kind == FKind::False) return false;
      if (c->kind == FKind::True) continue;
      keys.push_back(c->key());
      canon.push_back(c);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& k : keys) key += k + "\n";
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool result = sat_check(canon);
    memo_.emplace(std::move(key), result);
    return result;
  }

  bool entails(const std::vector<FormulaPtr>& sigma, const FormulaPtr& phi) const {
    std::vector<FormulaPtr> q = sigma;
    q.push_back(f_not(phi));
    return !consistent(q);
  }

  Verdict decide(const std::vector<FormulaPtr>& sigma, const FormulaPtr& phi) const {
    if (entails(sigma, phi)) return Verdict::Entailed;
    if (entails(sigma, f_not(phi))) return Verdict::Refuted;
    return Verdict::Open;
  }

  size_t memo_size() const { return memo_.size(); }

 private:
  Universe universe_;
  mutable std::unordered_map<std::string, bool> memo_;

  bool sat_check(const std::vector<FormulaPtr>& sentences) const {
    sat::Solver solver;
    detail::Encoder enc(solver);
    for (const auto& s : sentences) {
      sat::Lit root = enc.encode(ground(s, universe_));
      solver.add_clause({root});
    }
    return solver.solve();
  }
};

inline bool consistent(const TheoryHandle& th) {
  return GroundReasoner(th.universe).consistent(th.sentences);
}

inline bool entails(const TheoryHandle& th, const FormulaPtr& phi) {
  if (!is_sentence(phi)) throw InputError("entailment query is not a sentence: " + phi->key());
  return GroundReasoner(th.universe).entails(th.sentences, phi);
}

inline Verdict decide(const TheoryHandle& th, const FormulaPtr& phi) {
  if (!is_sentence(phi)) throw InputError("decide query is not a sentence: " + phi->key());
  return GroundReasoner(th.universe).decide(th.sentences, phi);
}

}  // namespace gsynth

#endif
