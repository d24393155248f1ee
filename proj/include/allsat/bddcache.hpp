#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "allsat/blocking.hpp"
#include "allsat/nonblocking.hpp"
#include "allsat/obdd.hpp"
#include "json.hpp"

namespace allsat {

enum class CacheMode { Cutset, Separator };

inline constexpr Var kAllAssigned = std::numeric_limits<Var>::max();

// Encoding of the subinstance left after assigning x_1..x_cut.
struct CacheKey {
  Var cut = 0;
  std::vector<std::uint32_t> code;
  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const noexcept {
    std::size_t h = std::hash<Var>{}(k.cut);
    for (auto c : k.code) h ^= std::hash<std::uint32_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline CacheKey all_assigned_key() { return {kAllAssigned, {1}}; }

namespace detail {

// Shared by both key sources: `is_true(l)` reports whether literal l of a
// variable at most `cut` holds.
template <typename IsTrue>
CacheKey key_from(const CnfFormula& f, const CutStructure& cs, Var cut, CacheMode mode, IsTrue is_true) {
  CacheKey key{cut, {}};
  if (mode == CacheMode::Cutset) {
    for (auto id : cs.cutsets[cut])
      for (Lit l : f.clauses[id].lits)
        if (l.var() <= cut && is_true(l)) {
          key.code.push_back(id);
          break;
        }
  } else {
    for (Var v : cs.separators[cut])
      if (is_true(Lit(v, false))) key.code.push_back(v);
  }
  return key;
}

}  // namespace detail

// Key of the current subinstance given that x_1..x_cut are assigned. Reads no
// variable above `cut`.
inline CacheKey make_cache_key(const CnfFormula& f, const CutStructure& cs, const Trail& t,
                               Var cut, CacheMode mode) {
  if (cut == kAllAssigned) return all_assigned_key();
  return detail::key_from(f, cs, cut, mode, [&](Lit l) { return t.value(l) == Value::True; });
}

// Same key from an explicit prefix x_1..x_k (literals in variable order).
inline CacheKey make_cache_key(const CnfFormula& f, const CutStructure& cs, std::span<const Lit> prefix,
                               CacheMode mode) {
  const Var cut = static_cast<Var>(prefix.size());
  return detail::key_from(f, cs, cut, mode, [&](Lit l) { return prefix[l.var() - 1] == l; });
}

struct RefreshPolicy {
  std::size_t threshold = 0;  // θ; 0 disables refreshing
  std::string dump_dir;       // empty: no files written
  std::string instance = "instance";
  bool retain = false;        // keep dumped diagrams in memory
};

struct DumpPart {
  std::string path;
  BigCount count = 0;
  std::optional<Obdd> diagram;
};

struct BddConfig {
  CacheMode mode = CacheMode::Cutset;
  NonBlockingConfig nb;           // non-blocking engine
  bool continue_search = false;   // blocking engine: phase saving across restarts
};

struct BddHooks : Hooks {
  // Called on every cache hit after the diagram is extended: the assigned
  // prefix x_1..x_{i-1} and the node it now leads to.
  std::function<void(const Obdd&, std::span<const Lit>, NodeId)> on_hit;
};

struct BddResult : EnumerationResult {
  Obdd diagram;
  BigCount final_count = 0;
  std::vector<DumpPart> parts;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t suppressed_hits = 0;
};

namespace detail {

// S, T, the working diagram and the last extended path.
class FormulaCache {
 public:
  FormulaCache(const CnfFormula& f, CacheMode mode, RefreshPolicy policy)
      : f_(f), cuts_(compute_cuts(f)), mode_(mode), policy_(std::move(policy)), diagram_(f.num_vars) {
    if (policy_.threshold && policy_.threshold <= f.num_vars)
      throw std::invalid_argument("refresh threshold must exceed the number of variables");
    reset();
  }

  CacheKey key(const Trail& t, Var cut) const { return make_cache_key(f_, cuts_, t, cut, mode_); }
  CacheKey key(std::span<const Lit> prefix) const { return make_cache_key(f_, cuts_, prefix, mode_); }

  std::optional<NodeId> lookup(const CacheKey& k) const {
    auto it = solved_.find(k);
    if (it == solved_.end()) return std::nullopt;
    return it->second;
  }

  void extend(std::span<const Lit> prefix, NodeId g) {
    diagram_.extend(prefix, g, &path_nodes_);
    path_lits_.assign(prefix.begin(), prefix.end());
  }

  void remember(Var j, CacheKey k, std::uint32_t level) { pending_[j] = {std::move(k), level}; }

  // Enroll stage: nodes on the last path whose subinstance is exhausted once
  // the search drops to `bl`.
  void associate(const Trail& t, std::uint32_t bl) {
    for (std::size_t k = 0; k < path_nodes_.size(); ++k) {
      Lit l = path_lits_[k];
      Var j = l.var();
      if (!t.assigned(j)) break;
      auto it = pending_.find(j);
      if (bl < t.level_of(j) && it != pending_.end()) solved_.emplace(it->second.key, path_nodes_[k]);
      if (t.value(l) == Value::False) break;
    }
  }

  void prune(std::uint32_t bl) {
    std::erase_if(pending_, [bl](const auto& e) { return e.second.level > bl; });
  }
  void enroll(const CacheKey& k, NodeId h) { solved_.emplace(k, h); }

  const std::vector<NodeId>& path_nodes() const { return path_nodes_; }
  std::span<const Lit> path_lits() const { return path_lits_; }

  const Obdd& diagram() const { return diagram_; }
  Obdd& diagram() { return diagram_; }
  std::uint32_t epoch() const { return epoch_; }

  bool needs_refresh() const {
    return policy_.threshold && diagram_.branch_nodes() >= policy_.threshold - f_.num_vars;
  }

  // Moves the working diagram into a dump part and restarts caching empty.
  void refresh(std::vector<DumpPart>& parts) {
    DumpPart part;
    part.count = diagram_.count_models();
    if (!policy_.dump_dir.empty()) {
      std::filesystem::create_directories(policy_.dump_dir);
      part.path = (std::filesystem::path(policy_.dump_dir) /
                   (policy_.instance + ".part" + std::to_string(parts.size() + 1) + ".obdd"))
                      .string();
      std::ofstream out(part.path);
      diagram_.dump(out);
      if (!out) throw std::runtime_error("cannot write " + part.path);
    }
    if (policy_.retain) part.diagram = diagram_;
    parts.push_back(std::move(part));
    reset();
    ++epoch_;
  }

  const RefreshPolicy& policy() const { return policy_; }

  std::size_t memory_estimate() const {
    std::size_t bytes = diagram_.memory_estimate();
    for (const auto& [k, v] : solved_) bytes += 64 + k.code.capacity() * sizeof(std::uint32_t);
    for (const auto& [j, e] : pending_) bytes += 64 + e.key.code.capacity() * sizeof(std::uint32_t);
    return bytes;
  }

 private:
  struct Pending {
    CacheKey key;
    std::uint32_t level;
  };

  void reset() {
    diagram_.clear();
    solved_.clear();
    solved_.emplace(all_assigned_key(), kTrueNode);
    pending_.clear();
    path_nodes_.clear();
    path_lits_.clear();
  }

  const CnfFormula& f_;
  CutStructure cuts_;
  CacheMode mode_;
  RefreshPolicy policy_;
  Obdd diagram_;
  std::unordered_map<CacheKey, NodeId, CacheKeyHash> solved_;
  std::map<Var, Pending> pending_;
  std::vector<NodeId> path_nodes_;
  std::vector<Lit> path_lits_;
  std::uint32_t epoch_ = 0;
};

// Prefixes x_1..x_k already emitted by cache hits, tagged with the diagram
// epoch they went into.
class EmissionTrie {
 public:
  EmissionTrie() { nodes_.push_back({}); }

  void add(std::span<const Lit> prefix, std::uint32_t epoch) {
    std::size_t cur = 0;
    nodes_[0].min_epoch = std::min(nodes_[0].min_epoch, epoch);
    for (Lit l : prefix) {
      const int side = l.negative() ? 0 : 1;
      if (nodes_[cur].child[side] < 0) {
        nodes_[cur].child[side] = static_cast<int>(nodes_.size());
        nodes_.push_back({});
      }
      cur = static_cast<std::size_t>(nodes_[cur].child[side]);
      nodes_[cur].min_epoch = std::min(nodes_[cur].min_epoch, epoch);
    }
    nodes_[cur].end_epoch = std::min(nodes_[cur].end_epoch, epoch);
  }

  // True if some emission from an epoch below `before` is a prefix or an
  // extension of `prefix`.
  bool overlaps(std::span<const Lit> prefix, std::uint32_t before = kAnyEpoch) const {
    std::size_t cur = 0;
    for (Lit l : prefix) {
      if (nodes_[cur].end_epoch < before) return true;
      int c = nodes_[cur].child[l.negative() ? 0 : 1];
      if (c < 0) return false;
      cur = static_cast<std::size_t>(c);
    }
    return nodes_[cur].min_epoch < before;
  }

  std::size_t memory_estimate() const { return nodes_.capacity() * sizeof(Node); }

  static constexpr std::uint32_t kAnyEpoch = std::numeric_limits<std::uint32_t>::max();

 private:
  struct Node {
    int child[2] = {-1, -1};
    std::uint32_t end_epoch = kAnyEpoch;
    std::uint32_t min_epoch = kAnyEpoch;
  };
  std::vector<Node> nodes_;
};

inline std::vector<Lit> assigned_prefix(const Trail& t, Var cut) {
  std::vector<Lit> p;
  Var upto = cut == kAllAssigned ? t.num_vars() : cut;
  p.reserve(upto);
  for (Var v = 1; v <= upto; ++v) p.push_back(Lit(v, t.value(Lit(v, false)) != Value::True));
  return p;
}

inline void finish_bdd(BddResult& res, const FormulaCache& cache) {
  res.diagram = cache.diagram();
  res.final_count = res.diagram.count_models();
  BigCount total = res.final_count;
  for (const auto& p : res.parts) total += p.count;
  res.models = total;
}

}  // namespace detail

// Writes `<instance>.manifest.json` into the dump directory.
inline void write_manifest(const CnfFormula& f, const RefreshPolicy& policy, const BddResult& res) {
  if (policy.dump_dir.empty()) return;
  nlohmann::json j;
  j["instance"] = policy.instance;
  j["num_vars"] = f.num_vars;
  std::vector<Var> order;
  for (Var v = 1; v <= f.num_vars; ++v) order.push_back(f.external_name(v));
  j["variable_order"] = order;
  j["complete"] = res.complete;
  j["parts"] = nlohmann::json::array();
  for (const auto& p : res.parts)
    j["parts"].push_back({{"file", std::filesystem::path(p.path).filename().string()},
                          {"count", to_string(p.count)}});
  j["final_count"] = to_string(res.final_count);
  j["total_count"] = to_string(res.models);
  std::filesystem::create_directories(policy.dump_dir);
  std::ofstream out(std::filesystem::path(policy.dump_dir) / (policy.instance + ".manifest.json"));
  out << j.dump(2) << '\n';
}

// Non-blocking enumeration with formula-BDD caching. Solutions are reported
// only through the diagram (and the dumped parts when refreshing).
inline BddResult enumerate_bdd(const CnfFormula& f, const BddConfig& cfg, const BddHooks& hooks = {},
                               Limits limits = {}, RefreshPolicy policy = {}) {
  Budget budget(limits);
  BddResult res;
  detail::FormulaCache cache(f, cfg.mode, std::move(policy));
  NonBlockingSearch s(f, cfg.nb, DecisionOrder::Fixed, hooks);
  Kernel& k = s.kernel();
  s.set_backtrack_listener([&](std::uint32_t bl) {
    cache.associate(k.trail(), bl);
    cache.prune(bl);
  });
  auto finish = [&](bool complete) {
    res.complete = complete;
    res.stats = k.stats();
    res.peak_mem = budget.peak_mem();
    detail::finish_bdd(res, cache);
    res.seconds = budget.elapsed_s();
    write_manifest(f, cache.policy(), res);
    return res;
  };
  if (k.root_conflict()) return finish(true);

  for (;;) {
    if (budget.exceeded(k.memory_estimate() + cache.memory_estimate())) return finish(false);
    ClauseRef confl = k.propagate();
    if (confl != kNoClause) {
      if (k.level() == 0) return finish(true);
      if (s.resolve(confl) == NonBlockingSearch::Outcome::Halt) return finish(true);
      continue;
    }
    Var i = k.smallest_unassigned();
    Var cut = i == 0 ? kAllAssigned : i - 1;
    CacheKey key = cache.key(k.trail(), cut);
    if (auto g = cache.lookup(key)) {
      ++res.cache_hits;
      ++res.cubes;
      auto prefix = detail::assigned_prefix(k.trail(), cut);
      cache.extend(prefix, *g);
      if (hooks.on_hit) hooks.on_hit(cache.diagram(), prefix, *g);
      if (k.level() == 0) return finish(true);
      s.backtrack_after_solution();
      if (cache.needs_refresh()) cache.refresh(res.parts);
      continue;
    }
    ++res.cache_misses;
    cache.remember(i, std::move(key), k.level() + 1);
    auto branch = k.pick_branch();
    if (!branch || branch->var() != i) throw InternalError("fixed order violated");
    k.decide(*branch);
  }
}

// Blocking enumeration with formula-BDD caching. Each hit emits the cached
// subinstance under the current prefix and blocks the current decisions; a
// subinstance is enrolled once unit propagation refutes its prefix and all of
// its emissions went into the working diagram. Hits that would re-emit part of
// an earlier emission are treated as misses.
inline BddResult enumerate_bdd_blocking(const CnfFormula& f, const BddConfig& cfg,
                                        const BddHooks& hooks = {}, Limits limits = {},
                                        RefreshPolicy policy = {}) {
  Budget budget(limits);
  BddResult res;
  detail::FormulaCache cache(f, cfg.mode, std::move(policy));
  detail::EmissionTrie emitted;
  Kernel k(f, DecisionOrder::Fixed);
  k.set_phase_saving(cfg.continue_search);
  auto finish = [&](bool complete) {
    res.complete = complete;
    res.stats = k.stats();
    res.peak_mem = budget.peak_mem();
    detail::finish_bdd(res, cache);
    res.seconds = budget.elapsed_s();
    write_manifest(f, cache.policy(), res);
    return res;
  };
  if (k.root_conflict()) return finish(true);

  for (;;) {
    if (budget.exceeded(k.memory_estimate() + cache.memory_estimate() + emitted.memory_estimate()))
      return finish(false);
    ClauseRef confl = k.propagate();
    if (confl != kNoClause) {
      if (k.level() == 0) return finish(true);
      auto learned = k.analyze(confl, UipScheme::Standard);
      if (hooks.on_learned) hooks.on_learned(k, *learned);
      k.cancel_to(learned->backjump_level);
      k.request_unit_check(learned->ref);
      continue;
    }
    Var i = k.smallest_unassigned();
    Var cut = i == 0 ? kAllAssigned : i - 1;
    CacheKey key = cache.key(k.trail(), cut);
    auto g = cache.lookup(key);
    std::vector<Lit> prefix;
    if (g) {
      prefix = detail::assigned_prefix(k.trail(), cut);
      if (emitted.overlaps(prefix)) {
        ++res.suppressed_hits;
        g.reset();
      }
    }
    if (!g) {
      ++res.cache_misses;
      auto branch = k.pick_branch();
      if (!branch || branch->var() != i) throw InternalError("fixed order violated");
      k.decide(*branch);
      continue;
    }

    ++res.cache_hits;
    ++res.cubes;
    cache.extend(prefix, *g);
    emitted.add(prefix, cache.epoch());
    if (hooks.on_hit) hooks.on_hit(cache.diagram(), prefix, *g);
    const Trail& t = k.trail();
    std::vector<Lit> clause;
    for (std::uint32_t lv = 1; lv <= t.level(); ++lv) {
      clause.push_back(~t.decision_at(lv));
      k.save_phase(t.decision_at(lv));
    }
    if (clause.empty()) return finish(true);
    k.cancel_to(0);
    if (hooks.on_blocking_clause) hooks.on_blocking_clause(clause);
    k.add_blocking(std::move(clause));

    // Enroll deepest first. Keys come from the path prefix itself, so nodes
    // reached through implied variables qualify too. A shorter prefix can
    // pass only if every longer one does, so the scan stops at the first
    // failure.
    const auto& nodes = cache.path_nodes();
    auto lits = cache.path_lits();
    for (std::size_t pos = nodes.size(); pos-- > 0;) {
      auto ph = lits.subspan(0, pos);
      if (!k.refutes(ph) || emitted.overlaps(ph, cache.epoch())) break;
      cache.enroll(cache.key(ph), nodes[pos]);
    }
    if (cache.needs_refresh()) cache.refresh(res.parts);
  }
}

}  // namespace allsat
