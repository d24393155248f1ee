#pragma once

#include <algorithm>
#include <vector>

#include "allsat/hooks.hpp"
#include "allsat/kernel.hpp"
#include "allsat/limits.hpp"

namespace allsat {

enum class BlockingClauseKind {
  Decisions,    // negated decisions (optionally simplified)
  AllLiterals,  // negation of the whole total assignment
};

struct BlockingConfig {
  bool simplify = false;
  bool continue_search = false;
  BlockingClauseKind kind = BlockingClauseKind::Decisions;
};

// Decisions saved right before a solution-triggered restart, in level order.
struct ProgressArray {
  std::vector<Lit> decisions;
};

namespace detail {

inline bool is_decision(const Trail& t, Var v) {
  return t.reason(v) == kNoClause && t.level_of(v) >= 1;
}

}  // namespace detail

// Decision literals kept by near-minimal simplification of a total satisfying
// trail: decisions some implication depends on directly, plus, for each
// problem or blocking clause still unsatisfied, its lowest-level satisfying
// decision. Result is in level order.
inline std::vector<Lit> simplify_assignment(const Kernel& k) {
  const Trail& t = k.trail();
  std::vector<std::uint8_t> selected(t.num_vars() + 1, 0);
  for (const auto& e : t.entries()) {
    if (e.reason == kNoClause) continue;
    for (Lit q : k.clause(e.reason).lits)
      if (q != e.lit && detail::is_decision(t, q.var())) selected[q.var()] = 1;
  }
  auto covers = [&](Lit l) {
    if (t.value(l) != Value::True) return false;
    return !detail::is_decision(t, l.var()) || selected[l.var()];
  };
  for (ClauseRef r = 0; r < k.num_clauses(); ++r) {
    const Clause& c = k.clause(r);
    if (c.origin == ClauseOrigin::Learned) continue;
    if (std::any_of(c.lits.begin(), c.lits.end(), covers)) continue;
    Lit best = kNoLit;
    for (Lit l : c.lits) {
      if (t.value(l) != Value::True) continue;
      if (!best.valid() || t.level_of(l.var()) < t.level_of(best.var())) best = l;
    }
    if (!best.valid()) throw InternalError("simplification on a non-satisfying trail");
    selected[best.var()] = 1;
  }
  std::vector<Lit> out;
  for (std::uint32_t lv = 1; lv <= t.level(); ++lv) {
    Lit d = t.decision_at(lv);
    if (selected[d.var()]) out.push_back(d);
  }
  return out;
}

// Blocking clause for the current total assignment. `simplified` holds the
// decisions kept by simplify_assignment when cfg.simplify is set. An empty
// result means every remaining solution is covered.
inline std::vector<Lit> make_blocking_clause(const Trail& t, const BlockingConfig& cfg,
                                             std::span<const Lit> simplified = {}) {
  std::vector<Lit> clause;
  if (cfg.kind == BlockingClauseKind::AllLiterals) {
    for (const auto& e : t.entries()) clause.push_back(~e.lit);
    std::sort(clause.begin(), clause.end(),
              [](Lit a, Lit b) { return a.var() < b.var(); });
    return clause;
  }
  if (cfg.simplify) {
    for (Lit d : simplified) clause.push_back(~d);
    return clause;
  }
  for (std::uint32_t lv = 1; lv <= t.level(); ++lv) clause.push_back(~t.decision_at(lv));
  return clause;
}

// Re-makes the saved decisions in level order after a restart, propagating
// after each. Stops at the first conflict (returned) or at the first saved
// decision whose variable already holds the opposite value.
inline ClauseRef replay_decisions(Kernel& k, const ProgressArray& p) {
  ClauseRef confl = k.propagate();
  if (confl != kNoClause) return confl;
  for (Lit d : p.decisions) {
    Value v = k.value(d);
    if (v == Value::True) continue;
    if (v == Value::False) break;
    k.decide(d);
    confl = k.propagate();
    if (confl != kNoClause) return confl;
  }
  return kNoClause;
}

// Blocking-clause enumeration: after each solution a blocking clause is added
// and the search restarts from level 0. Emitted cubes have pairwise disjoint
// expansions.
inline EnumerationResult enumerate_blocking(const CnfFormula& f, const BlockingConfig& cfg,
                                            const Hooks& hooks = {}, Limits limits = {}) {
  if (cfg.kind == BlockingClauseKind::AllLiterals && cfg.simplify)
    throw std::invalid_argument("simplification applies to decision-based blocking clauses only");
  Budget budget(limits);
  EnumerationResult res;
  Kernel k(f, DecisionOrder::Activity);
  k.set_phase_saving(cfg.continue_search);
  k.force_decisions(hooks.forced_decisions);
  auto finish = [&](bool complete) {
    res.complete = complete;
    res.stats = k.stats();
    res.peak_mem = budget.peak_mem();
    res.seconds = budget.elapsed_s();
    return res;
  };
  if (k.root_conflict()) return finish(!budget.exceeded(k.memory_estimate()));

  std::vector<Lit> cube;
  ClauseRef confl = kNoClause;
  bool have_conflict = false;
  for (;;) {
    if (budget.exceeded(k.memory_estimate())) return finish(false);
    if (!have_conflict) confl = k.propagate();
    have_conflict = false;
    if (confl != kNoClause) {
      if (k.level() == 0) return finish(true);
      auto learned = k.analyze(confl, UipScheme::Standard);
      if (hooks.on_learned) hooks.on_learned(k, *learned);
      k.cancel_to(learned->backjump_level);
      if (k.unit_literal(learned->ref) == learned->lits[0])
        k.enqueue(learned->lits[0], learned->ref);
      else
        k.request_unit_check(learned->ref);
      continue;
    }
    auto branch = k.pick_branch();
    if (branch) {
      k.decide(*branch);
      continue;
    }

    // Total satisfying assignment.
    const Trail& t = k.trail();
    std::vector<Lit> kept;
    cube.clear();
    if (cfg.simplify) {
      kept = simplify_assignment(k);
      std::vector<std::uint8_t> keep(t.num_vars() + 1, 0);
      for (Lit d : kept) keep[d.var()] = 1;
      for (const auto& e : t.entries())
        if (!detail::is_decision(t, e.lit.var()) || keep[e.lit.var()]) cube.push_back(e.lit);
    } else {
      for (const auto& e : t.entries()) cube.push_back(e.lit);
    }
    std::sort(cube.begin(), cube.end(), [](Lit a, Lit b) { return a.var() < b.var(); });
    ++res.cubes;
    res.models += pow2(t.num_vars() - cube.size());
    if (hooks.on_cube) hooks.on_cube(cube);

    auto clause = make_blocking_clause(t, cfg, kept);
    if (clause.empty()) return finish(true);
    ProgressArray progress;
    if (cfg.continue_search) {
      for (std::uint32_t lv = 1; lv <= t.level(); ++lv) {
        progress.decisions.push_back(t.decision_at(lv));
        k.save_phase(t.decision_at(lv));
      }
    }
    k.cancel_to(0);
    if (hooks.on_blocking_clause) hooks.on_blocking_clause(clause);
    k.add_blocking(std::move(clause));
    if (cfg.continue_search) {
      confl = replay_decisions(k, progress);
      have_conflict = true;
    }
  }
}

}  // namespace allsat
