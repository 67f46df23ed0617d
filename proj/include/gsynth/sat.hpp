#ifndef GSYNTH_SAT_HPP
#define GSYNTH_SAT_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace gsynth::sat {

// Literals are nonzero ints: +v / -v for variable v >= 1.
using Lit = int;
using Clause = std::vector<Lit>;

// DPLL with two watched literals. No clause learning; instances here are
// groundings of small first-order theories and stay modest.
class Solver {
 public:
  int new_var() { return ++nvars_; }

  void add_clause(Clause c) {
    // drop duplicate literals, detect tautologies
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (size_t i = 0; i + 1 < c.size(); ++i)
      if (c[i] == -c[i + 1]) return;
    if (c.empty()) {
      unsat_ = true;
      return;
    }
    clauses_.push_back(std::move(c));
  }

  bool solve() {
    if (unsat_) return false;
    assign_.assign(nvars_ + 1, 0);
    trail_.clear();
    watches_.assign(2 * nvars_ + 2, {});
    std::vector<Lit> units;
    for (size_t ci = 0; ci < clauses_.size(); ++ci) {
      auto& c = clauses_[ci];
      if (c.size() == 1) {
        units.push_back(c[0]);
      } else {
        watches_[widx(c[0])].push_back(ci);
        watches_[widx(c[1])].push_back(ci);
      }
    }
    for (Lit u : units) {
      if (value(u) == -1) return false;
      if (value(u) == 0 && !enqueue_and_propagate(u)) return false;
    }
    return search();
  }

  // valid only after solve() returned true
  bool model_value(int var) const { return assign_[var] == 1; }

  int num_vars() const { return nvars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }

 private:
  int nvars_ = 0;
  bool unsat_ = false;
  std::vector<Clause> clauses_;
  std::vector<int8_t> assign_;           // 0 unset, 1 true, -1 false
  std::vector<Lit> trail_;
  std::vector<std::vector<size_t>> watches_;

  size_t widx(Lit l) const { return l > 0 ? static_cast<size_t>(l) : nvars_ - l; }

  int value(Lit l) const {
    int8_t v = assign_[std::abs(l)];
    return l > 0 ? v : -v;
  }

  bool enqueue_and_propagate(Lit l) {
    size_t head = trail_.size();
    assign_[std::abs(l)] = l > 0 ? 1 : -1;
    trail_.push_back(l);
    while (head < trail_.size()) {
      Lit p = trail_[head++];
      Lit falsified = -p;
      std::vector<size_t> wl = std::move(watches_[widx(falsified)]);
      watches_[widx(falsified)].clear();
      bool conflict = false;
      for (size_t i = 0; i < wl.size(); ++i) {
        size_t ci = wl[i];
        if (conflict) {
          watches_[widx(falsified)].push_back(ci);
          continue;
        }
        Clause& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (value(c[0]) == 1) {
          watches_[widx(falsified)].push_back(ci);
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != -1) {
            std::swap(c[1], c[k]);
            watches_[widx(c[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        watches_[widx(falsified)].push_back(ci);
        if (value(c[0]) == -1) {
          conflict = true;
          continue;
        }
        Lit unit = c[0];
        assign_[std::abs(unit)] = unit > 0 ? 1 : -1;
        trail_.push_back(unit);
      }
      if (conflict) return false;
    }
    return true;
  }

  bool search() {
    int var = pick_unassigned();
    if (var == 0) return true;
    for (int phase = 0; phase < 2; ++phase) {
      Lit l = phase == 0 ? var : -var;
      size_t mark = trail_.size();
      if (enqueue_and_propagate(l)) {
        if (search()) return true;
      }
      undo_to(mark);
    }
    return false;
  }

  int pick_unassigned() const {
    for (int v = 1; v <= nvars_; ++v)
      if (assign_[v] == 0) return v;
    return 0;
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      assign_[std::abs(trail_.back())] = 0;
      trail_.pop_back();
    }
  }
};

}  // namespace gsynth::sat

#endif
