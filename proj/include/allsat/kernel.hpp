#pragma once

#include <algorithm>
#include <cassert>
#include <deque>
#include <limits>
#include <span>
#include <optional>
#include <vector>

#include "allsat/formula.hpp"
#include "allsat/trail.hpp"

namespace allsat {

enum class DecisionOrder { Activity, Fixed };

// Which part of the implication graph first-UIP traversal treats as the
// current region; literals outside the region become clause literals.
enum class UipScheme {
  Standard,       // whole current level, unique root assumed
  Sublevel,       // current sublevel of the current level
  DecisionLevel,  // whole current level, NULL-antecedent literals not expanded
};

struct KernelStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t learned = 0;
  std::uint64_t max_trail = 0;
};

struct Learned {
  std::vector<Lit> lits;  // lits[0] is the negated UIP
  Lit uip;                // the UIP assignment (true on the conflict trail)
  std::uint32_t backjump_level = 0;
  ClauseRef ref = kNoClause;
  bool targeted = false;  // produced by analyze_to
};

namespace detail {

// Binary max-heap over variables keyed by activity; ties go to the lower index.
class VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& act) : act_(act) {}

  void reset(Var n) {
    index_.assign(n + 1, -1);
    heap_.clear();
    for (Var v = 1; v <= n; ++v) insert(v);
  }
  bool contains(Var v) const { return index_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void insert(Var v) {
    if (contains(v)) return;
    index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }
  void increased(Var v) {
    if (contains(v)) up(static_cast<std::size_t>(index_[v]));
  }
  Var pop() {
    Var top = heap_.front();
    heap_.front() = heap_.back();
    index_[heap_.front()] = 0;
    heap_.pop_back();
    index_[top] = -1;
    if (!heap_.empty()) down(0);
    return top;
  }

 private:
  bool before(Var a, Var b) const { return act_[a] > act_[b] || (act_[a] == act_[b] && a < b); }
  void up(std::size_t i) {
    Var v = heap_[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!before(v, heap_[p])) break;
      heap_[i] = heap_[p];
      index_[heap_[i]] = static_cast<int>(i);
      i = p;
    }
    heap_[i] = v;
    index_[v] = static_cast<int>(i);
  }
  void down(std::size_t i) {
    Var v = heap_[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap_.size()) break;
      if (c + 1 < heap_.size() && before(heap_[c + 1], heap_[c])) ++c;
      if (!before(heap_[c], v)) break;
      heap_[i] = heap_[c];
      index_[heap_[i]] = static_cast<int>(i);
      i = c;
    }
    heap_[i] = v;
    index_[v] = static_cast<int>(i);
  }

  const std::vector<double>& act_;
  std::vector<Var> heap_;
  std::vector<int> index_;
};

}  // namespace detail

// Two-watched-literal propagation engine with the first-UIP variants used by
// the enumerators. Problem, learned and blocking clauses share one arena but
// the problem formula itself is never modified.
class Kernel {
 public:
  static constexpr double kActivityBump = 1.0;
  static constexpr double kActivityDecay = 0.95;

  Kernel(const CnfFormula& f, DecisionOrder order)
      : trail_(f.num_vars), order_(order), activity_(f.num_vars + 1, 0.0),
        phase_(f.num_vars + 1, -1), seen_(f.num_vars + 1, 0), heap_(activity_) {
    watches_.assign(2 * (f.num_vars + 1), {});
    clauses_.reserve(f.clauses.size());
    for (const auto& c : f.clauses) clauses_.push_back(c);
    // Attaching last-to-first makes each watch list visit clauses in
    // ascending id order after the initial watch moves settle.
    for (std::size_t i = clauses_.size(); i-- > 0;) {
      const auto& c = clauses_[i];
      if (c.lits.empty()) {
        root_conflict_ = true;
      } else if (c.lits.size() == 1) {
        watches_[c.lits[0].code()].push_back(static_cast<ClauseRef>(i));
        units_.push_back(static_cast<ClauseRef>(i));
      } else {
        watches_[c.lits[0].code()].push_back(static_cast<ClauseRef>(i));
        watches_[c.lits[1].code()].push_back(static_cast<ClauseRef>(i));
      }
    }
    std::reverse(units_.begin(), units_.end());
    pending_.assign(units_.begin(), units_.end());
    heap_.reset(f.num_vars);
  }

  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  Var num_vars() const { return trail_.num_vars(); }
  const Trail& trail() const { return trail_; }
  std::uint32_t level() const { return trail_.level(); }
  const KernelStats& stats() const { return stats_; }

  // True if the problem contains an empty clause.
  bool root_conflict() const { return root_conflict_; }

  const Clause& clause(ClauseRef r) const { return clauses_[r]; }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t num_problem_clauses() const { return problem_count(); }

  Value value(Lit l) const { return trail_.value(l); }

  // Unit propagation to fixpoint. Returns the falsified clause or kNoClause.
  ClauseRef propagate() {
    if (root_conflict_) return kNoClause;
    ClauseRef confl = check_pending();
    if (confl != kNoClause) return confl;
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++].lit;
      Lit false_lit = ~p;
      auto& ws = watches_[false_lit.code()];
      std::size_t i = 0, j = 0;
      for (; i < ws.size(); ++i) {
        ClauseRef cr = ws[i];
        auto& lits = clauses_[cr].lits;
        if (lits.size() == 1) {
          ws[j++] = cr;
          confl = cr;
          ++i;
          break;
        }
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        if (trail_.value(lits[0]) == Value::True) {
          ws[j++] = cr;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (trail_.value(lits[k]) != Value::False) {
            std::swap(lits[1], lits[k]);
            watches_[lits[1].code()].push_back(cr);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = cr;
        if (trail_.value(lits[0]) == Value::False) {
          confl = cr;
          ++i;
          break;
        }
        enqueue(lits[0], cr);
      }
      for (; i < ws.size(); ++i) ws[j++] = ws[i];
      ws.resize(j);
      if (confl != kNoClause) {
        qhead_ = trail_.size();
        return confl;
      }
    }
    return kNoClause;
  }

  // First-UIP analysis of `confl` under `scheme`. The learned clause is added
  // to the store and attached; nothing is enqueued. Returns nullopt when the
  // conflict is at level 0.
  std::optional<Learned> analyze(ClauseRef confl, UipScheme scheme) {
    if (trail_.level() == 0) return std::nullopt;
    const std::uint32_t L = trail_.level();
    std::uint32_t S = 0;
    if (scheme == UipScheme::Sublevel) {
      for (Lit q : clauses_[confl].lits)
        if (trail_.level_of(q.var()) == L) S = std::max(S, trail_.sublevel_of(q.var()));
    }
    auto in_region = [&](Var v) {
      if (trail_.level_of(v) != L) return false;
      return scheme != UipScheme::Sublevel || trail_.sublevel_of(v) == S;
    };
    auto stop = [](Lit, std::size_t remaining) { return remaining == 0; };
    return run_analysis(confl, in_region, stop, scheme == UipScheme::DecisionLevel);
  }

  // Analysis that resolves back exactly to `unit`, a literal enqueued at the
  // current level: every current-level vertex implied after it is expanded and
  // everything assigned before it is kept as a clause literal.
  std::optional<Learned> analyze_to(ClauseRef confl, Lit unit) {
    if (trail_.level() == 0) return std::nullopt;
    const std::uint32_t L = trail_.level();
    const std::size_t start = trail_.position(unit.var());
    auto in_region = [&](Var v) {
      return trail_.level_of(v) == L && trail_.position(v) >= start;
    };
    auto stop = [unit](Lit p, std::size_t) { return p == unit; };
    auto l = run_analysis(confl, in_region, stop, false);
    if (l) l->targeted = true;
    return l;
  }

  ClauseRef add_learned(std::vector<Lit> lits) {
    ++stats_.learned;
    return add_clause(std::move(lits), ClauseOrigin::Learned);
  }

  // Adds a clause at the current trail state; the next propagate() enqueues
  // it if unit and reports it if falsified.
  ClauseRef add_blocking(std::vector<Lit> lits) {
    ClauseRef r = add_clause(std::move(lits), ClauseOrigin::Blocking);
    request_unit_check(r);
    return r;
  }

  void request_unit_check(ClauseRef r) { pending_.push_back(r); }

  // Returns the single unassigned literal of `r` if every other literal is
  // false, otherwise kNoLit.
  Lit unit_literal(ClauseRef r) const {
    Lit unit = kNoLit;
    for (Lit l : clauses_[r].lits) {
      Value v = trail_.value(l);
      if (v == Value::True) return kNoLit;
      if (v == Value::Unassigned) {
        if (unit.valid()) return kNoLit;
        unit = l;
      }
    }
    return unit;
  }

  void enqueue(Lit l, ClauseRef reason) {
    push(l, reason);
    ++stats_.propagations;
  }

  // Queue of literals decided before the heuristic is consulted. Entries whose
  // variable is already assigned are skipped.
  void force_decisions(std::vector<Lit> lits) { forced_.assign(lits.begin(), lits.end()); }

  void set_phase_saving(bool on) { use_saved_phase_ = on; }
  void save_phase(Lit l) { phase_[l.var()] = l.negative() ? 0 : 1; }

  // Next decision literal, or nullopt when every variable is assigned.
  std::optional<Lit> pick_branch() {
    while (!forced_.empty()) {
      Lit l = forced_.front();
      forced_.pop_front();
      if (!trail_.assigned(l.var())) return l;
    }
    Var v = 0;
    if (order_ == DecisionOrder::Fixed) {
      v = smallest_unassigned();
    } else {
      while (!heap_.empty()) {
        Var c = heap_.pop();
        if (!trail_.assigned(c)) {
          v = c;
          break;
        }
      }
    }
    if (v == 0) return std::nullopt;
    bool positive = use_saved_phase_ && phase_[v] == 1;
    return Lit(v, !positive);
  }

  // Smallest unassigned variable index, 0 if none.
  Var smallest_unassigned() const {
    for (Var v = 1; v <= num_vars(); ++v)
      if (!trail_.assigned(v)) return v;
    return 0;
  }

  void decide(Lit l) {
    trail_.new_level();
    ++stats_.decisions;
    push(l, kNoClause);
  }

  void cancel_to(std::uint32_t level) {
    if (level >= trail_.level()) return;
    std::size_t keep = trail_.level_start(level + 1);
    for (std::size_t i = trail_.size(); i-- > keep;) heap_.insert(trail_[i].lit.var());
    trail_.cancel_to(level);
    qhead_ = std::min(qhead_, trail_.size());
    for (ClauseRef u : units_) pending_.push_back(u);
  }

  // Cancels every level >= `level` and re-inserts the negation of the decision
  // of `level` at level-1 as a NULL-antecedent literal opening a new sublevel.
  void flip_decision(std::uint32_t level) {
    assert(level >= 1 && level <= trail_.level());
    Lit d = trail_.decision_at(level);
    cancel_to(level - 1);
    trail_.open_sublevel();
    push(~d, kNoClause);
  }

  // Assumes `lits` on top of the current trail in a scratch level, propagates,
  // and reports whether a conflict arises. The trail is restored.
  bool refutes(std::span<const Lit> lits) {
    const std::uint32_t base = trail_.level();
    const auto saved_pending = pending_;
    const KernelStats saved_stats = stats_;
    const std::size_t saved_qhead = qhead_;
    trail_.new_level();
    bool conflict = false;
    for (Lit l : lits) {
      Value v = trail_.value(l);
      if (v == Value::False) {
        conflict = true;
        break;
      }
      if (v == Value::Unassigned) trail_.assign(l, kNoClause);
      if (propagate() != kNoClause) {
        conflict = true;
        break;
      }
    }
    if (!conflict && propagate() != kNoClause) conflict = true;
    cancel_to(base);
    pending_ = saved_pending;
    stats_ = saved_stats;
    qhead_ = saved_qhead;
    return conflict;
  }

  std::size_t memory_estimate() const {
    std::size_t bytes = sizeof(*this) + trail_.num_vars() * 64;
    for (const auto& c : clauses_) bytes += sizeof(Clause) + c.lits.capacity() * sizeof(Lit);
    for (const auto& w : watches_) bytes += w.capacity() * sizeof(ClauseRef);
    return bytes;
  }

 private:
  void push(Lit l, ClauseRef reason) {
    trail_.assign(l, reason);
    stats_.max_trail = std::max<std::uint64_t>(stats_.max_trail, trail_.size());
  }

  std::size_t problem_count() const {
    std::size_t n = 0;
    for (const auto& c : clauses_)
      if (c.origin == ClauseOrigin::Problem) ++n;
    return n;
  }

  ClauseRef add_clause(std::vector<Lit> lits, ClauseOrigin origin) {
    ClauseRef r = static_cast<ClauseRef>(clauses_.size());
    clauses_.push_back({std::move(lits), r, origin});
    auto& c = clauses_.back().lits;
    if (c.empty()) return r;
    if (c.size() == 1) {
      watches_[c[0].code()].push_back(r);
      units_.push_back(r);
      return r;
    }
    // Watch the two literals that will be unassigned longest on backtracking:
    // non-false first, then false ones by latest trail position.
    auto rank = [&](Lit l) -> std::size_t {
      if (trail_.value(l) != Value::False) return std::numeric_limits<std::size_t>::max();
      return trail_.position(l.var());
    };
    for (std::size_t w = 0; w < 2; ++w) {
      std::size_t best = w;
      for (std::size_t k = w + 1; k < c.size(); ++k)
        if (rank(c[k]) > rank(c[best])) best = k;
      std::swap(c[w], c[best]);
    }
    watches_[c[0].code()].push_back(r);
    watches_[c[1].code()].push_back(r);
    return r;
  }

  ClauseRef check_pending() {
    std::size_t i = 0;
    ClauseRef confl = kNoClause;
    for (; i < pending_.size(); ++i) {
      ClauseRef r = pending_[i];
      const auto& lits = clauses_[r].lits;
      if (lits.empty()) continue;
      bool satisfied = false;
      std::size_t unassigned = 0;
      Lit unit;
      for (Lit l : lits) {
        Value v = trail_.value(l);
        if (v == Value::True) {
          satisfied = true;
          break;
        }
        if (v == Value::Unassigned) {
          ++unassigned;
          unit = l;
        }
      }
      if (satisfied || unassigned > 1) continue;
      if (unassigned == 0) {
        confl = r;
        ++i;
        break;
      }
      make_watched(r, unit);
      enqueue(unit, r);
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(i));
    return confl;
  }

  // Ensures `unit` and the latest-assigned false literal are the watches of r.
  void make_watched(ClauseRef r, Lit unit) {
    auto& c = clauses_[r].lits;
    if (c.size() < 2 || c[0] == unit) return;
    if (c[1] == unit) {
      std::swap(c[0], c[1]);
      return;
    }
    // `unit` is not watched: move one watch onto it. The replaced watch is a
    // false literal; keep the one with the later position.
    std::size_t drop = trail_.position(c[0].var()) < trail_.position(c[1].var()) ? 0 : 1;
    Lit old = c[drop];
    auto& ws = watches_[old.code()];
    ws.erase(std::find(ws.begin(), ws.end(), r));
    auto it = std::find(c.begin(), c.end(), unit);
    std::swap(c[drop], *it);
    watches_[unit.code()].push_back(r);
    if (drop == 1) std::swap(c[0], c[1]);
  }

  template <typename InRegion, typename Stop>
  std::optional<Learned> run_analysis(ClauseRef confl, InRegion in_region, Stop stop,
                                      bool null_is_boundary) {
    ++stats_.conflicts;
    Learned out;
    out.lits.push_back(kNoLit);
    std::vector<Var> touched;
    std::size_t remaining = 0;
    auto visit = [&](const std::vector<Lit>& lits, Var skip) {
      for (Lit q : lits) {
        Var v = q.var();
        if (v == skip || seen_[v]) continue;
        seen_[v] = 1;
        touched.push_back(v);
        bump(v);
        if (in_region(v))
          ++remaining;
        else
          out.lits.push_back(q);
      }
    };
    visit(clauses_[confl].lits, 0);
    std::size_t idx = trail_.size();
    for (;;) {
      if (remaining == 0 || idx == 0) throw InternalError("conflict analysis ran off the trail");
      do {
        --idx;
      } while (!(seen_[trail_[idx].lit.var()] && in_region(trail_[idx].lit.var())));
      Lit p = trail_[idx].lit;
      --remaining;
      if (stop(p, remaining)) {
        out.uip = p;
        out.lits[0] = ~p;
        break;
      }
      ClauseRef reason = trail_.reason(p.var());
      if (reason == kNoClause) {
        if (!null_is_boundary) throw InternalError("multiple roots in analysis region");
        out.lits.push_back(~p);
        continue;
      }
      visit(clauses_[reason].lits, p.var());
    }
    for (Var v : touched) seen_[v] = 0;
    decay();

    const std::uint32_t L = trail_.level();
    std::uint32_t bl = 0;
    for (std::size_t k = 1; k < out.lits.size(); ++k) {
      std::uint32_t lv = trail_.level_of(out.lits[k].var());
      if (lv < L) bl = std::max(bl, lv);
    }
    out.backjump_level = bl;
    out.ref = add_learned(out.lits);
    out.lits = clauses_[out.ref].lits;
    // Keep the negated UIP first for callers.
    auto it = std::find(out.lits.begin(), out.lits.end(), ~out.uip);
    std::rotate(out.lits.begin(), it, it + 1);
    return out;
  }

  void bump(Var v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    heap_.increased(v);
  }
  void decay() { var_inc_ *= 1.0 / kActivityDecay; }

  std::vector<Clause> clauses_;
  std::vector<std::vector<ClauseRef>> watches_;
  std::vector<ClauseRef> units_;
  std::vector<ClauseRef> pending_;
  Trail trail_;
  std::size_t qhead_ = 0;
  DecisionOrder order_;
  std::vector<double> activity_;
  double var_inc_ = kActivityBump;
  std::vector<std::int8_t> phase_;
  bool use_saved_phase_ = false;
  std::vector<std::uint8_t> seen_;
  detail::VarHeap heap_;
  std::deque<Lit> forced_;
  KernelStats stats_;
  bool root_conflict_ = false;
};

}  // namespace allsat
