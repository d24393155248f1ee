#pragma once

#include <vector>

#include "allsat/types.hpp"

namespace allsat {

struct TrailEntry {
  Lit lit;
  std::uint32_t level = 0;
  std::uint32_t sublevel = 0;
  ClauseRef reason = kNoClause;  // kNoClause: decision or flipped decision
};

// Assignment stack. Entries are grouped by decision level; each level is split
// into sublevels, the first opened by the level's decision and each further one
// by a flipped decision inserted on chronological backtracking. Antecedents make
// the trail double as the implication graph.
class Trail {
 public:
  explicit Trail(Var num_vars)
      : values_(num_vars + 1, Value::Unassigned),
        levels_(num_vars + 1, 0),
        sublevels_(num_vars + 1, 0),
        reasons_(num_vars + 1, kNoClause),
        positions_(num_vars + 1, 0),
        level_starts_{0},
        current_sublevel_{0} {}

  Var num_vars() const { return static_cast<Var>(values_.size() - 1); }
  std::uint32_t level() const { return static_cast<std::uint32_t>(level_starts_.size() - 1); }
  std::uint32_t sublevel() const { return current_sublevel_.back(); }
  std::size_t size() const { return entries_.size(); }
  bool complete() const { return entries_.size() == num_vars(); }

  std::span<const TrailEntry> entries() const { return entries_; }
  const TrailEntry& operator[](std::size_t i) const { return entries_[i]; }

  Value value(Var v) const { return values_[v]; }
  Value value(Lit l) const { return value_of_lit(values_[l.var()], l); }
  bool assigned(Var v) const { return values_[v] != Value::Unassigned; }
  std::uint32_t level_of(Var v) const { return levels_[v]; }
  std::uint32_t sublevel_of(Var v) const { return sublevels_[v]; }
  ClauseRef reason(Var v) const { return reasons_[v]; }
  std::size_t position(Var v) const { return positions_[v]; }

  // Index of the first entry of `level`.
  std::size_t level_start(std::uint32_t level) const { return level_starts_[level]; }

  // The decision literal that opened `level` (level >= 1).
  Lit decision_at(std::uint32_t level) const {
    assert(level >= 1 && level <= this->level());
    return entries_[level_starts_[level]].lit;
  }

  void new_level() {
    level_starts_.push_back(entries_.size());
    current_sublevel_.push_back(0);
  }

  void open_sublevel() { ++current_sublevel_.back(); }

  // Appends `lit` at the current level and sublevel.
  void assign(Lit lit, ClauseRef reason) {
    Var v = lit.var();
    if (values_[v] != Value::Unassigned)
      throw InternalError("variable " + std::to_string(v) + " assigned twice");
    values_[v] = lit.negative() ? Value::False : Value::True;
    levels_[v] = level();
    sublevels_[v] = sublevel();
    reasons_[v] = reason;
    positions_[v] = entries_.size();
    entries_.push_back({lit, level(), sublevel(), reason});
  }

  // Removes every entry above `level`.
  void cancel_to(std::uint32_t level) {
    assert(level <= this->level());
    if (level == this->level()) return;
    std::size_t keep = level_starts_[level + 1];
    for (std::size_t i = entries_.size(); i-- > keep;) {
      Var v = entries_[i].lit.var();
      values_[v] = Value::Unassigned;
      reasons_[v] = kNoClause;
    }
    entries_.resize(keep);
    level_starts_.resize(level + 1);
    current_sublevel_.resize(level + 1);
  }

 private:
  std::vector<Value> values_;
  std::vector<std::uint32_t> levels_;
  std::vector<std::uint32_t> sublevels_;
  std::vector<ClauseRef> reasons_;
  std::vector<std::size_t> positions_;
  std::vector<TrailEntry> entries_;
  std::vector<std::size_t> level_starts_;
  std::vector<std::uint32_t> current_sublevel_;
};

}  // namespace allsat
