#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "allsat/hooks.hpp"
#include "allsat/kernel.hpp"
#include "allsat/limits.hpp"

namespace allsat {

enum class ResolveStrategy { BT, BJ, CBJ, BJCBJ };

struct NonBlockingConfig {
  UipScheme uip = UipScheme::DecisionLevel;  // Sublevel or DecisionLevel
  ResolveStrategy strategy = ResolveStrategy::BJ;
};

// Resolution of clauses `a` and `b` on `pivot`.
inline std::vector<Lit> resolve_clauses(std::span<const Lit> a, std::span<const Lit> b, Var pivot) {
  std::vector<Lit> out;
  for (auto src : {a, b})
    for (Lit l : src)
      if (l.var() != pivot && std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

// Search state of the non-blocking procedure: the kernel plus the limit level.
// Conflict resolution never revisits a reported total assignment.
class NonBlockingSearch {
 public:
  enum class Outcome { Continue, Halt };
  // Invoked with the target level right before any backtrack, while the trail
  // still holds the pre-backtrack state.
  using BacktrackListener = std::function<void(std::uint32_t)>;

  NonBlockingSearch(const CnfFormula& f, NonBlockingConfig cfg, DecisionOrder order,
                    const Hooks& hooks)
      : cfg_(cfg), kernel_(f, order), hooks_(hooks) {
    if (cfg.uip == UipScheme::Standard)
      throw std::invalid_argument("non-blocking search needs the sublevel or decision-level scheme");
    kernel_.force_decisions(hooks.forced_decisions);
  }

  Kernel& kernel() { return kernel_; }
  const Kernel& kernel() const { return kernel_; }
  std::uint32_t lim() const { return lim_; }
  std::uint32_t level() const { return kernel_.level(); }

  void set_backtrack_listener(BacktrackListener l) { listener_ = std::move(l); }

  // Chronological backtrack after a reported solution (dl >= 1).
  void backtrack_after_solution() {
    bt();
    lim_ = level();
  }

  // Chronological backtracking: cancels the current level and inserts its
  // flipped decision one level down with NULL antecedent.
  void bt() { flip_at(level()); }

  // Resolves a pending conflict at level >= 1 with the configured strategy.
  Outcome resolve(ClauseRef confl) {
    switch (cfg_.strategy) {
      case ResolveStrategy::BT: {
        learn(confl);
        bt();
        lim_ = level();
        return Outcome::Continue;
      }
      case ResolveStrategy::BJ:
        return resolve_bj(confl);
      case ResolveStrategy::CBJ: {
        Outcome o = resolve_cbj(confl);
        lim_ = std::min(lim_, level());
        return o;
      }
      case ResolveStrategy::BJCBJ:
        return resolve_bjcbj(confl);
    }
    return Outcome::Continue;
  }

  // Level-limited non-chronological backtracking.
  Outcome resolve_bj(ClauseRef confl) {
    Learned l = learn(confl);
    if (lim_ < level()) {
      jump(std::max(l.backjump_level, lim_));
    } else {
      bt();
      lim_ = level();
    }
    return Outcome::Continue;
  }

  Outcome resolve_bjcbj(ClauseRef confl) {
    if (lim_ < level()) {
      Learned l = learn(confl);
      jump(std::max(l.backjump_level, lim_));
      return Outcome::Continue;
    }
    Outcome o = resolve_cbj(confl);
    lim_ = level();
    return o;
  }

  // Conflict-directed backjumping driven by a stack of learned clauses.
  Outcome resolve_cbj(ClauseRef confl) {
    std::vector<ClauseRef> stack;
    std::vector<ClauseRef> deferred;
    auto done = [&](Outcome o) {
      for (ClauseRef r : deferred) kernel_.request_unit_check(r);
      return o;
    };
    for (;;) {
      if (confl != kNoClause) {
        if (level() == 0) return done(Outcome::Halt);
        Learned l = learn(confl, /*check_unit=*/false);
        stack.push_back(l.ref);
        bt();
      } else if (!stack.empty()) {
        ClauseRef cl1 = stack.back();
        stack.pop_back();
        Lit unit = kernel_.unit_literal(cl1);
        if (unit.valid()) {
          kernel_.enqueue(unit, cl1);
          ClauseRef c2 = kernel_.propagate();
          if (c2 != kNoClause) {
            if (level() == 0) return done(Outcome::Halt);
            auto l2 = kernel_.analyze_to(c2, unit);
            if (hooks_.on_learned) hooks_.on_learned(kernel_, *l2);
            deferred.push_back(l2->ref);
            auto cl3 = resolve_clauses(kernel_.clause(cl1).lits, l2->lits, unit.var());
            std::uint32_t bl = 0;
            for (Lit q : cl3) bl = std::max(bl, kernel_.trail().level_of(q.var()));
            if (cl3.empty() || bl == 0) return done(Outcome::Halt);
            Learned l3;
            l3.lits = cl3;
            l3.ref = kernel_.add_learned(std::move(cl3));
            if (hooks_.on_learned) hooks_.on_learned(kernel_, l3);
            stack.push_back(l3.ref);
            flip_at(bl);
          }
        }
      } else {
        break;
      }
      confl = kernel_.propagate();
    }
    return done(Outcome::Continue);
  }

 private:
  Learned learn(ClauseRef confl, bool check_unit = true) {
    auto l = kernel_.analyze(confl, cfg_.uip);
    if (!l) throw InternalError("conflict resolution at level 0");
    if (hooks_.on_learned) hooks_.on_learned(kernel_, *l);
    if (check_unit) kernel_.request_unit_check(l->ref);
    return *l;
  }

  void flip_at(std::uint32_t level) {
    if (listener_) listener_(level - 1);
    kernel_.flip_decision(level);
  }

  void jump(std::uint32_t bl) {
    if (listener_) listener_(bl);
    kernel_.cancel_to(bl);
  }

  NonBlockingConfig cfg_;
  Kernel kernel_;
  const Hooks& hooks_;
  std::uint32_t lim_ = 0;
  BacktrackListener listener_;
};

// Enumerates every total satisfying assignment exactly once without blocking
// clauses.
inline EnumerationResult enumerate_nonblocking(const CnfFormula& f, const NonBlockingConfig& cfg,
                                               const Hooks& hooks = {}, Limits limits = {}) {
  Budget budget(limits);
  EnumerationResult res;
  NonBlockingSearch s(f, cfg, DecisionOrder::Activity, hooks);
  Kernel& k = s.kernel();
  auto finish = [&](bool complete) {
    res.complete = complete;
    res.stats = k.stats();
    res.peak_mem = budget.peak_mem();
    res.seconds = budget.elapsed_s();
    return res;
  };
  if (k.root_conflict()) return finish(!budget.exceeded(k.memory_estimate()));

  std::vector<Lit> cube;
  for (;;) {
    if (budget.exceeded(k.memory_estimate())) return finish(false);
    ClauseRef confl = k.propagate();
    if (confl != kNoClause) {
      if (k.level() == 0) return finish(true);
      if (s.resolve(confl) == NonBlockingSearch::Outcome::Halt) return finish(true);
      continue;
    }
    auto branch = k.pick_branch();
    if (branch) {
      k.decide(*branch);
      continue;
    }
    cube.clear();
    for (const auto& e : k.trail().entries()) cube.push_back(e.lit);
    std::sort(cube.begin(), cube.end(), [](Lit a, Lit b) { return a.var() < b.var(); });
    ++res.cubes;
    res.models += 1;
    if (hooks.on_cube) hooks.on_cube(cube);
    if (k.level() == 0) return finish(true);
    s.backtrack_after_solution();
  }
}

}  // namespace allsat
